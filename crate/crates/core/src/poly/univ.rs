/// Minimal ring interface for dense univariate division.
pub trait RingElem: Clone {
    fn zero_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
}

/// Divides `f` by `g` (coefficient vectors, index = exponent) given an exact
/// inverse of the leading coefficient of `g`. Returns `(q, r)` with
/// `f = q g + r` and `r` of length `deg g`.
pub fn div_rem_dense<R: RingElem>(f: &[R], g: &[R], inv_lead: &R) -> (Vec<R>, Vec<R>) {
    let d = g.len() - 1;
    let zero = inv_lead.zero_like();
    let mut r = f.to_vec();
    if r.len() <= d {
        r.resize(d, zero);
        return (Vec::new(), r);
    }
    let mut q = vec![zero.clone(); r.len() - d];
    for k in (d..r.len()).rev() {
        if r[k].is_zero() {
            continue;
        }
        let coef = r[k].mul(inv_lead);
        for j in 0..=d {
            if !g[j].is_zero() {
                r[k - d + j] = r[k - d + j].sub(&coef.mul(&g[j]));
            }
        }
        debug_assert!(r[k].is_zero());
        q[k - d] = coef;
    }
    r.truncate(d);
    (q, r)
}
