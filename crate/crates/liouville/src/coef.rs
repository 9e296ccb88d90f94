//! The coefficient field of the whole crate: rational functions in an
//! optional named parameter over the rationals. Parameter-free values
//! are constants of the field, so all code paths are shared whether or
//! not an equation declares a parameter.

use crate::rat::Rat;
use crate::upoly::{UniPoly, URat};

pub type Coef = URat<Rat>;

impl URat<Rat> {
    /// The parameter itself as a field element.
    pub fn param() -> Coef {
        URat::from_poly(UniPoly::var())
    }

    pub fn from_rat_value(r: &Rat) -> Coef {
        URat::constant(r.clone())
    }

    pub fn from_int_value(n: i64) -> Coef {
        URat::constant(Rat::from_int(n))
    }

    /// Plain rational value, if the element is parameter-free.
    pub fn as_rat(&self) -> Option<Rat> {
        self.as_constant()
    }

    /// True when the element does not involve the parameter.
    pub fn is_rational(&self) -> bool {
        self.is_constant()
    }

    /// Sign used for display and canonical normalization: the sign of
    /// the leading numerator coefficient (the monic denominator is
    /// always "positive").
    pub fn display_negative(&self) -> bool {
        self.num()
            .leading()
            .map(|c| c.is_negative())
            .unwrap_or(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn param_arithmetic() {
        let b = Coef::param();
        let inv = b.inv();
        assert!(b.mul(&inv).is_one());
        assert_eq!(Coef::from_int_value(3).as_rat(), Some(Rat::from_int(3)));
        assert_eq!(b.as_rat(), None);
    }
}
