mod evolve;
mod expand;
mod fields;
mod identities;
mod validate;

pub use evolve::{run_evolve, EvolveReport, PsiRow};
pub use expand::{cbar_table, run_expand, CbarRow, ConventionCheck, ExpandReport, FitRow, ResidualRow};
pub use fields::{run_fields, FieldsSummary, FIELD_COLUMNS};
pub use identities::{
    run_identities, HilbertSummary, IdentitiesReport, IdentityRow, OddRow, DOUBLED_VERDICT, HALVED_VERDICT, NO_VERDICT,
};
pub use validate::{run_validate, ConventionSummary, IdentitySummary, ValidateReport};
