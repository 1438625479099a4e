// Float supplies the libm-backed math methods on f64 when std is absent.
// Once any crate in the graph links std its inherent methods take over and
// the glob imports of this module look unused, hence the allows at the use sites.
#[allow(unused_imports)]
pub(crate) use num_traits::Float;
