//! Unions of two multiplicative power ranges and their coded product
//! instances.
//!
//! Two positive generators that are multiplicatively independent span a
//! dense set of power products, which is what makes the downstream
//! machinery bite: the densest patch of products compresses onto the unit
//! band `(1, 2)` where a tagged function over the coded pair set records
//! the product of each pair. Dependence between the generators collapses
//! the grid, so it is rejected up front.

use crate::error::{Error, Result};
use crate::func::TaggedFunction;
use crate::integers::{compress, dense_window, AffineMap};
use crate::interval::Interval;
use crate::normalize::{shift_positive, space_out};
use crate::rational::Rational;
use crate::set::DiscreteSet;
use crate::tupling::tuple_encode;

fn check_generator(name: &str, g: &Rational) -> Result<()> {
    if !g.is_positive() {
        return Err(Error::Precondition(format!(
            "{name} generator must be positive, got {g}"
        )));
    }
    if *g == Rational::one() {
        return Err(Error::Precondition(format!(
            "{name} generator must not be one"
        )));
    }
    Ok(())
}

fn ascending_powers(g: &Rational, bound: usize) -> Vec<Rational> {
    let mut powers = Vec::with_capacity(bound);
    let mut acc = Rational::one();
    for _ in 0..bound {
        acc = &acc * g;
        powers.push(acc.clone());
    }
    powers
}

/// The union `{alpha^i : |i| <= bound} ∪ {beta^j : |j| <= bound}`, after
/// checking that no relation `alpha^p = beta^q` or `alpha^p beta^q = 1`
/// holds for exponents up to the bound; either would make the logarithm of
/// one generator in the other rational.
pub fn two_subgroups(alpha: &Rational, beta: &Rational, bound: usize) -> Result<DiscreteSet> {
    check_generator("first", alpha)?;
    check_generator("second", beta)?;

    let alpha_powers = ascending_powers(alpha, bound);
    let beta_powers = ascending_powers(beta, bound);
    let one = Rational::one();
    for (p, ap) in alpha_powers.iter().enumerate() {
        for (q, bq) in beta_powers.iter().enumerate() {
            if ap == bq {
                return Err(Error::Dependence(format!(
                    "log base {alpha} of {beta} is rational: {alpha}^{} = {beta}^{}",
                    p + 1,
                    q + 1
                )));
            }
            if ap * bq == one {
                return Err(Error::Dependence(format!(
                    "log base {alpha} of {beta} is rational: {alpha}^{} * {beta}^{} = 1",
                    p + 1,
                    q + 1
                )));
            }
        }
    }

    let mut elements = vec![one];
    for powers in [&alpha_powers, &beta_powers] {
        for value in powers {
            elements.push(value.clone());
            elements.push(value.invert()?);
        }
    }
    Ok(DiscreteSet::from_dedup(elements))
}

/// The full grid `alpha^i * beta^j` for `|i|, |j| <= bound`, in row order.
/// Independence is not assumed; a dependent pair simply yields repeats.
pub fn power_products(alpha: &Rational, beta: &Rational, bound: usize) -> Result<Vec<Rational>> {
    check_generator("first", alpha)?;
    check_generator("second", beta)?;
    let signed = i64::try_from(bound)
        .map_err(|_| Error::Precondition(format!("power bound {bound} is too large")))?;
    let mut grid = Vec::with_capacity((2 * bound + 1) * (2 * bound + 1));
    for i in -signed..=signed {
        let ai = alpha.pow(i)?;
        for j in -signed..=signed {
            grid.push(&ai * &beta.pow(j)?);
        }
    }
    Ok(grid)
}

/// A coded product instance: the generator union, its pair coding, the
/// densest product window, and the compressed product function on the
/// coded pairs whose product falls inside the window.
#[derive(Clone, Debug)]
pub struct ProductInstance {
    pub group: DiscreteSet,
    pub coded: DiscreteSet,
    pub window: Interval,
    pub map: AffineMap,
    pub func: TaggedFunction,
}

/// Chains the reductions: shift the union positive, spread its gaps to at
/// least one, code ordered pairs into single values, and tag each coded
/// value with the product of the two original elements behind it. The
/// densest window of those products, at the given tolerance, is compressed
/// onto `(1, 2)`; pairs whose product falls on or outside the window's ends
/// drop out of the function.
pub fn product_instance(
    alpha: &Rational,
    beta: &Rational,
    bound: usize,
    eps: &Rational,
) -> Result<ProductInstance> {
    let group = two_subgroups(alpha, beta, bound)?;
    let shifted = shift_positive(&group)?;
    let spread = space_out(&shifted.set)?;
    let code = tuple_encode(&spread.set, 2)?;

    let mut tagged: Vec<(Rational, Rational)> = Vec::with_capacity(code.entries().len());
    let mut products: Vec<Rational> = Vec::with_capacity(code.entries().len());
    for (tuple, value) in code.entries() {
        let mut product = Rational::one();
        for component in tuple {
            let unspread = spread.map.preimage(component).ok_or_else(|| {
                Error::Validation(format!("no spread preimage for {component}"))
            })?;
            let original = shifted.map.preimage(unspread).ok_or_else(|| {
                Error::Validation(format!("no shift preimage for {unspread}"))
            })?;
            product = &product * original;
        }
        products.push(product.clone());
        tagged.push((value.clone(), product));
    }

    let window = dense_window(&products, eps)?;
    let map = compress(&window)?;
    let pairs = tagged
        .into_iter()
        .filter(|(_, product)| window.contains(product))
        .map(|(value, product)| (value, map.apply(&product)))
        .collect();
    let func = TaggedFunction::from_pairs(pairs)?;

    Ok(ProductInstance {
        group,
        coded: code.image().clone(),
        window,
        map,
        func,
    })
}
