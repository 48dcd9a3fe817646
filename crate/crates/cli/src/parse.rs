use num_bigint::BigInt;
use num_rational::BigRational;
use tmpow::approx::LinearForm;
use tmpow::field::{FieldElement, NumberField};
use tmpow::{Error, Result};

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn int(s: &str) -> Result<BigInt> {
    s.trim()
        .parse()
        .map_err(|_| bad(format!("not an integer: {s:?}")))
}

/// `golden`, `plastic`, `lehmer`, a single integer `b` (the field of `x − b`),
/// or comma-separated minimal-polynomial coefficients, constant term first.
pub fn field(text: &str) -> Result<NumberField> {
    let coeffs: Vec<i64> = match text.trim() {
        "golden" => vec![-1, -1, 1],
        "plastic" => vec![-1, -1, 0, 1],
        "lehmer" => vec![1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1],
        s if !s.contains(',') => return NumberField::integer(int(s)?),
        s => {
            let cs = s.split(',').map(int).collect::<Result<Vec<_>>>()?;
            return NumberField::parse(cs);
        }
    };
    NumberField::parse(coeffs)
}

/// Power-basis coordinates `c_0:c_1:…` of one element.
pub fn element(f: &NumberField, text: &str) -> Result<FieldElement> {
    let coords = text.split(':').map(int).collect::<Result<Vec<_>>>()?;
    if coords.len() > f.degree() {
        return Err(bad(format!(
            "{text:?} has {} coordinates, field degree is {}",
            coords.len(),
            f.degree()
        )));
    }
    f.element(coords)
}

/// Comma-separated `a_1,…,a_k`, each an integer or `c_0:c_1:…` coordinates.
pub fn form(f: &NumberField, text: &str) -> Result<LinearForm> {
    let coeffs = text
        .split(',')
        .map(|s| element(f, s))
        .collect::<Result<Vec<_>>>()?;
    LinearForm::new(coeffs)
}

pub fn ints(text: &str) -> Result<Vec<BigInt>> {
    text.split([',', ':']).map(int).collect()
}

/// `p/q` or an integer.
pub fn rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let q = int(q)?;
            if q == BigInt::from(0) {
                return Err(bad("zero denominator"));
            }
            Ok(BigRational::new(int(p)?, q))
        }
        None => Ok(BigRational::from_integer(int(s)?)),
    }
}

/// A tolerance given as bits `p` or as `2^-p`.
pub fn tol_bits(text: &str) -> Result<u64> {
    let s = text.trim();
    let p = s.strip_prefix("2^-").unwrap_or(s);
    p.parse()
        .map_err(|_| bad(format!("tolerance must be p or 2^-p, got {text:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields() {
        assert!(field("2").unwrap().is_integer());
        assert_eq!(field("golden").unwrap().degree(), 2);
        assert_eq!(field("-1,-1,1").unwrap().degree(), 2);
        assert_eq!(field("lehmer").unwrap().degree(), 10);
        assert!(field("x").is_err());
    }

    #[test]
    fn forms_and_elements() {
        let f = field("golden").unwrap();
        let form = form(&f, "0,1:-1").unwrap();
        assert_eq!(form.k(), 2);
        assert_eq!(form.leading().coords(), &[BigInt::from(1), BigInt::from(-1)]);
        assert!(element(&f, "1:2:3").is_err());
    }

    #[test]
    fn scalars() {
        assert_eq!(rational("3/6").unwrap(), BigRational::new(1.into(), 2.into()));
        assert!(rational("1/0").is_err());
        assert_eq!(tol_bits("2^-80").unwrap(), 80);
        assert_eq!(tol_bits("64").unwrap(), 64);
    }
}
