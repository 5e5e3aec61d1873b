"""spanrule: span demonstrations in, denoised training labels out."""

from .corpus import Corpus, Document, EntitySpan, Token, load_corpus, tokenize
from .glm import Concept, ConceptElement, ConceptStore, Interaction
from .rules import ABSTAIN, LabelMatrix, LabelingFunction, Predicate, Rule
from .synthesizer import CandidateSet, expand, generalization_score, rank

__all__ = [
    "ABSTAIN", "CandidateSet", "Concept", "ConceptElement", "ConceptStore",
    "Corpus", "Document", "EntitySpan", "Interaction", "LabelMatrix",
    "LabelingFunction", "Predicate", "Rule", "Token", "expand",
    "generalization_score", "load_corpus", "rank", "tokenize",
]

__version__ = "0.1.0"
