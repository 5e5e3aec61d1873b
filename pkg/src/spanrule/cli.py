"""Command line entry points: serve the API, replay a session log, evaluate."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import end_model as em
from .project import load_project_corpora, read_event_log, replay


@click.group()
def main():
    """Interactive weak supervision engine."""


@main.command()
@click.option("--data-dir", "data_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--ui-dir", default=None, type=click.Path(file_okay=False))
def serve(data_dir, port, host, ui_dir):
    """Run the HTTP API (and the browser UI if --ui-dir is given)."""
    import uvicorn

    from .server import create_app
    if ui_dir is None:
        bundled = Path(__file__).resolve().parent.parent.parent / "frontend" / "dist"
        if bundled.is_dir():
            ui_dir = str(bundled)
    uvicorn.run(create_app(data_dir, ui_dir), host=host, port=port)


@main.command("replay")
@click.option("--log", "log_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--corpus-dir", "corpus_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False))
def replay_cmd(log_path, corpus_dir, out_path):
    """Rebuild a project from an event log and emit its metrics JSON."""
    corpora, config = load_project_corpora(corpus_dir)
    events = read_event_log(log_path)
    project = replay(events, corpora, config)
    report = {
        "revision": project.revision,
        "n_functions": len(project.functions),
        "model_stats": project.model_stats.to_dict() if project.model_stats else None,
        "end_metrics": project.end_metrics,
    }
    payload = json.dumps(report, indent=2, sort_keys=True)
    if out_path:
        Path(out_path).write_text(payload + "\n", encoding="utf-8")
    else:
        click.echo(payload)


@main.command("eval")
@click.option("--project", "project_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--seed", default=42, show_default=True)
def eval_cmd(project_dir, seed):
    """Replay a project directory (project.json + events.jsonl) and retrain
    the end model under the given seed."""
    project_dir = Path(project_dir)
    corpora, config = load_project_corpora(project_dir)
    log = project_dir / "events.jsonl"
    events = read_event_log(log) if log.is_file() else []
    project = replay(events, corpora, config)
    if project.model is None:
        click.echo(json.dumps({"error": "no label model in this session"}))
        sys.exit(1)
    metrics = project.train(em.TrainConfig(seed=seed))
    click.echo(json.dumps(metrics, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
