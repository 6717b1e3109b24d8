from .structure import (
    CRWeylError, ReebSolveError, NotHorizontalError, H_TOL, EXACT_TOL, PD_FLOOR,
    CRWeylStructure, HFrame,
    validate, levi_metric, levi_gram, h_frame, i_on_frame, is_sasaki, h_frame_jets, reeb_field, faraday,
    sasaki_weyl_defect, max_defect, gauge_transform,
)
