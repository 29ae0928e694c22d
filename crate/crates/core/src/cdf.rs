//! Common interface over empirical step functions and analytic laws.

/// Anything with a distribution function on the real line.
pub trait CdfLike: Sync {
    /// Right-continuous distribution function.
    fn cdf(&self, x: f64) -> f64;

    /// Left limit F(x-). Equal to `cdf` for continuous laws.
    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }

    /// Generalized inverse, inf { x : F(x) >= p }.
    fn quantile(&self, p: f64) -> f64;

    /// First moment; non-finite when it does not exist.
    fn mean(&self) -> f64;

    /// Sorted atoms (each of mass 1/len) for purely discrete laws.
    fn atoms(&self) -> Option<&[f64]> {
        None
    }

    /// Closed form of x -> integral of F over (-inf, x], i.e. E(x - X)^+.
    fn integrated_cdf(&self, _x: f64) -> Option<f64> {
        None
    }

    /// Points where F is not smooth; quadrature splits there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}
