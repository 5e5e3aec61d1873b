"""HTTP/JSON API over projects; serves the browser UI as static assets."""

from __future__ import annotations

import secrets
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, RedirectResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import end_model as em
from .corpus import CorpusError, GazetteerProvider, load_corpus
from .glm import AnnotationError, Interaction
from .label_model import LabelModelError
from .project import (Project, ProjectConfig, ProjectError,
                      StaleSuggestionError)
from .rules import RuleError


class CreateProject(BaseModel):
    name: str
    files: dict[str, str]  # split -> filename relative to the data dir
    n_classes: int = 2
    label_names: Optional[list[str]] = None
    sampler_seed: int = 0
    sampler_policy: str = "entropy"


class InteractionBody(BaseModel):
    doc_uid: str
    spans: list[dict]
    links: list[dict] = []
    label: int


class AcceptBody(BaseModel):
    suggestion_token: str
    rule_ids: list[str]


class ConceptBody(BaseModel):
    name: str


class ElementBody(BaseModel):
    kind: str
    pattern: str


class TrainBody(BaseModel):
    seed: int = 42
    epochs: int = 100
    learning_rate: float = 0.1
    l2: float = 1e-4


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"code": code, "message": message})


def create_app(data_dir: str | Path, ui_dir: Optional[str | Path] = None) -> FastAPI:
    data_dir = Path(data_dir)
    app = FastAPI(title="spanrule")
    projects: dict[str, Project] = {}

    @app.exception_handler(StaleSuggestionError)
    async def _stale(_: Request, exc: StaleSuggestionError):
        return _error(409, "stale_token", str(exc))

    @app.exception_handler(ProjectError)
    async def _project(_: Request, exc: ProjectError):
        return _error(400, "project_error", str(exc))

    for exc_type, code in ((AnnotationError, "annotation_error"),
                           (RuleError, "rule_error"),
                           (CorpusError, "corpus_error"),
                           (LabelModelError, "label_model_error")):
        def _make(code=code):
            async def handler(_: Request, exc: Exception):
                return _error(400, code, str(exc))
            return handler
        app.add_exception_handler(exc_type, _make())

    def get_project(project_id: str) -> Project:
        if project_id not in projects:
            raise ProjectError(f"unknown project {project_id!r}")
        return projects[project_id]

    @app.post("/projects")
    def create_project(body: CreateProject):
        provider = GazetteerProvider()
        corpora = {}
        for split, fname in body.files.items():
            path = data_dir / fname
            if not path.is_file():
                raise ProjectError(f"no such corpus file {fname!r}")
            corpora[split] = load_corpus(str(path), split, provider)
        config = ProjectConfig(n_classes=body.n_classes,
                               label_names=body.label_names,
                               sampler_policy=body.sampler_policy,
                               sampler_seed=body.sampler_seed)
        project_id = secrets.token_hex(6)
        project = Project(project_id, corpora, config)
        project.attach_log(data_dir / "projects" / project_id / "events.jsonl")
        projects[project_id] = project
        return {"project_id": project_id}

    @app.get("/projects/{project_id}/next")
    def next_doc(project_id: str):
        return get_project(project_id).serve_next()

    @app.get("/projects/{project_id}/documents/{uid}")
    def document(project_id: str, uid: str):
        return get_project(project_id).document_payload(uid)

    @app.post("/projects/{project_id}/interactions")
    def submit(project_id: str, body: InteractionBody):
        project = get_project(project_id)
        ix = Interaction.from_dict(body.model_dump())
        token, candidates = project.submit_interaction(ix)
        return {"suggestion_token": token, "candidates": candidates}

    @app.post("/projects/{project_id}/functions")
    def accept(project_id: str, body: AcceptBody):
        project = get_project(project_id)
        stats = project.accept_functions(body.suggestion_token, body.rule_ids)
        return {"lf_stats": stats["lf_stats"], "model_stats": stats["model_stats"]}

    @app.delete("/projects/{project_id}/functions/{rule_id}")
    def remove(project_id: str, rule_id: str):
        stats = get_project(project_id).remove_function(rule_id)
        return {"lf_stats": stats["lf_stats"], "model_stats": stats["model_stats"]}

    @app.get("/projects/{project_id}/functions")
    def functions(project_id: str):
        return {"functions": get_project(project_id).list_functions()}

    @app.get("/projects/{project_id}/statistics")
    def statistics(project_id: str):
        return get_project(project_id).statistics()

    @app.get("/projects/{project_id}/concepts")
    def concepts(project_id: str):
        project = get_project(project_id)
        return {"concepts": project.store.to_dict()["concepts"]}

    @app.post("/projects/{project_id}/concepts")
    def create_concept(project_id: str, body: ConceptBody):
        get_project(project_id).edit_concept("create_concept", name=body.name)
        return {"ok": True}

    @app.delete("/projects/{project_id}/concepts/{name}")
    def delete_concept(project_id: str, name: str):
        get_project(project_id).edit_concept("delete_concept", name=name)
        return {"ok": True}

    @app.post("/projects/{project_id}/concepts/{name}/elements")
    def add_element(project_id: str, name: str, body: ElementBody):
        get_project(project_id).edit_concept(
            "add_element", name=name, element_kind=body.kind, pattern=body.pattern)
        return {"ok": True}

    @app.delete("/projects/{project_id}/concepts/{name}/elements")
    def remove_element(project_id: str, name: str, body: ElementBody):
        get_project(project_id).edit_concept(
            "remove_element", name=name, element_kind=body.kind, pattern=body.pattern)
        return {"ok": True}

    @app.post("/projects/{project_id}/train")
    def train(project_id: str, body: TrainBody):
        cfg = em.TrainConfig(learning_rate=body.learning_rate, l2=body.l2,
                             epochs=body.epochs, seed=body.seed)
        return get_project(project_id).train(cfg)

    @app.get("/projects/{project_id}/export/labels")
    def export_labels(project_id: str):
        return {"labels": get_project(project_id).export_labels()}

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

        @app.get("/", include_in_schema=False)
        def index():
            return RedirectResponse(url="/ui/")

    return app
