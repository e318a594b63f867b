"""Inter-coder agreement coefficients and a gated iterative coding workflow.

The package has one module per concern:

* ``model`` -- documents, codebooks, quotations, rounds, mutual
  exclusiveness, projections and masked sequential-coding views;
* ``alpha`` -- the Krippendorff alpha family (nominal, binary, per-domain
  cu-alpha, global Cu-alpha) with exact rational disagreement terms;
* ``workflow`` -- the replayable state machine with agreement gates, the
  disagreements diary, saturation records, and dual-screening schedules;
* ``categories`` -- groundedness/density statistics and core selection;
* ``project`` -- the canonical single-file project format, CSV ingestion,
  report emission, masked-round export;
* ``synth`` -- synthetic rounds with a controlled perturbation rate;
* ``cli`` -- the ``icaflow`` command-line front door.
"""

from .alpha import (
    AlphaReport,
    AlphaResult,
    CoincidenceMatrix,
    NO_CODE,
    ReliabilityMatrix,
    ReportRow,
    alpha_report,
    binary_alpha,
    build_coincidence,
    classify_band,
    cu_alpha,
    cu_alpha_global,
    disagreement_drilldown,
    nominal_alpha,
)
from .categories import (
    CandidateRanking,
    CodeStats,
    DomainStats,
    density,
    groundedness,
    rank_candidates,
    select_core,
)
from .errors import (
    DegenerateMatrixError,
    GeometryError,
    IcaflowError,
    InsufficientDataError,
    IntegrityError,
    OrderingError,
    ParseError,
    ProjectionError,
    ReusedDocumentsError,
    SchemaError,
    TransitionError,
    ValidationError,
    VocabularyError,
    WrongCoefficientError,
)
from .model import (
    Assignment,
    ChangeRecord,
    ChangeSet,
    Code,
    Codebook,
    Document,
    MaskedView,
    Quotation,
    Round,
    SemanticDomain,
    Violation,
    domain_projection,
    domain_set_projection,
    masked_view,
    normalize_assignments,
    validate_mutual_exclusiveness,
)
from .project import (
    ProjectConfig,
    ProjectFile,
    emit_alpha_table,
    export_masked_round,
    import_rating_csv,
    load_masked_round,
    load_project,
    loads_project,
    dumps_project,
    save_project,
)
from .synth import PerturbationMix, SynthConfig, SynthRound, generate_round
from .workflow import (
    DiaryEntry,
    GateDecision,
    Phase,
    PlanBatch,
    ProcessState,
    SaturationDecision,
    SelectionPlan,
    advance,
    allowed_events,
    dual_selection_schedule,
    evaluate_gate,
    initial_state,
    replay,
)

__version__ = "0.1.0"
