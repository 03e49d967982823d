"""Multi-domain opinion-leader agents for public opinion analysis."""

from .aqg import AqgConfig, Question, QuestionFormat, QuestionSet, build_question_set
from .config import RunConfig, load_config
from .embedding import EmbedderSpec, embed, embed_many, l2_sq
from .errors import MavensError
from .llm import BackendSpec, ChatRequest, Gateway, PromptTemplate, render
from .moa import MoaConfig, RoleResponse, run_role
from .vector_index import FlatIndex

__version__ = "0.1.0"

__all__ = [
    "AqgConfig",
    "BackendSpec",
    "ChatRequest",
    "EmbedderSpec",
    "FlatIndex",
    "Gateway",
    "MavensError",
    "MoaConfig",
    "PromptTemplate",
    "Question",
    "QuestionFormat",
    "QuestionSet",
    "RoleResponse",
    "RunConfig",
    "build_question_set",
    "embed",
    "embed_many",
    "l2_sq",
    "load_config",
    "render",
    "run_role",
]
