from .text import bleu, rouge_l_f1, tokenize
from .mauve import DivergenceCurve, mauve
from .report import MetricReport, evaluate, style_matrix

__all__ = [
    "bleu",
    "rouge_l_f1",
    "tokenize",
    "mauve",
    "DivergenceCurve",
    "MetricReport",
    "evaluate",
    "style_matrix",
]
