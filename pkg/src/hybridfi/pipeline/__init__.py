from .report import PipelineReport, SweepPoint, improvement_pct, write_frame, write_json
from .stages import (
    OBJECTIVES,
    ReconstructionConfig,
    SelectionConfig,
    Stage1Artifacts,
    choose_optimum,
    evaluate,
    reconstruct,
    run,
    selection_sweep,
    stage2_ranking,
)
