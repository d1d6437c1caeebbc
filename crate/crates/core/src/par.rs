//! Iterator entry points that switch between rayon and std with the
//! `parallel` feature. Call sites glob-import [`prelude`] and stick to
//! adaptors both libraries share: `map`, `filter`, `filter_map`, `any`,
//! `all`, `for_each`, `sum`, `collect`.

pub(crate) mod prelude {
    #[cfg(feature = "parallel")]
    pub(crate) use rayon::prelude::*;
}

/// `into_par_iter()` with the feature on, `into_iter()` otherwise.
macro_rules! into_iter {
    ($e:expr) => {{
        #[cfg(feature = "parallel")]
        {
            $e.into_par_iter()
        }
        #[cfg(not(feature = "parallel"))]
        {
            ::std::iter::IntoIterator::into_iter($e)
        }
    }};
}

/// `par_iter()` with the feature on, `iter()` otherwise.
#[allow(unused_macros)]
macro_rules! iter {
    ($e:expr) => {{
        #[cfg(feature = "parallel")]
        {
            $e.par_iter()
        }
        #[cfg(not(feature = "parallel"))]
        {
            $e.iter()
        }
    }};
}

pub(crate) use into_iter;
#[allow(unused_imports)]
pub(crate) use iter;

/// Whether this build runs data-parallel loops on the rayon pool.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
