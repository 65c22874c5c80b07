//! Bilingual English/Lithuanian lexicon engine: paradigm generation, a
//! transactional single-file store, translation lookup and lexicon merging.

pub mod bench;
pub mod features;
pub mod lexicon;
pub mod lookup;
pub mod merge;
pub mod morphology;
pub mod par;
pub mod storage;
pub mod synth;

pub use features::{Case, Feature, FeatureBundle, Gender, Language, Number, Pos};
pub use lexicon::{
    validate_entry, Defectiveness, Direction, DomainId, DomainTag, EntryId, LexicalEntry, LinkId,
    Regularity, TranslationLink, Verdict, Violation, ViolationCode,
};
pub use lookup::{analyze, prefix_search, query_surface, translate, Analysis, MatchedAs, TranslationCandidate};
pub use merge::{merge_stores, ConflictReport, MergeMode, MergePolicy};
pub use morphology::{
    generate_paradigm, inflect, load_paradigm_dir, load_paradigm_specs, GeneratedForm, Origin,
    ParadigmRegistry, ParadigmSpec, SpecSource,
};
pub use storage::{LexiconStore, OpenOptions, Snapshot, StoreError};
