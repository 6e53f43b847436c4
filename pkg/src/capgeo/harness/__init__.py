from capgeo.harness.constants import ConstantRecord, polya_szego_constants
from capgeo.harness.corpus import CORPUS_P_VALUES, corpus_bodies, flowable_corpus_bodies
from capgeo.harness.reports import (
    EXPLORATORY_IDS,
    INEQUALITY_IDS,
    InequalityReport,
    Ingredients,
    make_report,
)
from capgeo.harness.riesz import (
    RieszScan,
    double_layer_average,
    single_layer_potential,
    sphere_single_layer_exact,
)
from capgeo.harness.runner import (
    BodyEvaluation,
    build_ingredients,
    evaluate_body,
    plot_curves,
    run_sweep,
)
from capgeo.harness import evaluators

__all__ = [
    "ConstantRecord",
    "polya_szego_constants",
    "corpus_bodies",
    "flowable_corpus_bodies",
    "CORPUS_P_VALUES",
    "InequalityReport",
    "Ingredients",
    "make_report",
    "INEQUALITY_IDS",
    "EXPLORATORY_IDS",
    "RieszScan",
    "single_layer_potential",
    "double_layer_average",
    "sphere_single_layer_exact",
    "BodyEvaluation",
    "build_ingredients",
    "evaluate_body",
    "run_sweep",
    "plot_curves",
    "evaluators",
]
