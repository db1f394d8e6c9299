//! Small finite fields F_{p^m} with an explicit, reproducible modulus.
//!
//! Elements are coefficient vectors over the prime field, reduced modulo a
//! monic irreducible polynomial of degree m. The modulus is not arbitrary: we
//! take the lexicographically least monic irreducible (coefficients compared
//! from the top degree down), so F_25 is always built as F_5[w]/(w^2 + 2) and
//! F_125 as F_5[w]/(w^3 + w + 1). Pinning the modulus makes element strings
//! and enumeration order identical across runs and machines, which the
//! byte-for-byte report determinism relies on.

use super::PencilError;

/// Field context. All element operations go through methods on this struct;
/// a [`GfElement`] by itself is just a coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf {
    p: u64,
    m: usize,
    /// Monic modulus, coefficients little-endian, length m+1, top coeff 1.
    /// For m = 1 this is [0, 1] (reduction is plain mod p).
    modulus: Vec<u64>,
}

/// Element of F_{p^m}: little-endian coefficients, always of length m and
/// reduced mod p. Equality is coefficient equality (fields agree by
/// convention of use).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GfElement(pub Vec<u64>);

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Gf {
    /// The prime field F_p.
    pub fn prime_field(p: u64) -> Result<Gf, PencilError> {
        if !is_prime(p) {
            return Err(PencilError::NotPrime(p));
        }
        Ok(Gf { p, m: 1, modulus: vec![0, 1] })
    }

    /// The extension F_{p^m} under the canonical modulus. `m = 1` gives the
    /// prime field.
    pub fn extension(p: u64, m: usize) -> Result<Gf, PencilError> {
        if !is_prime(p) {
            return Err(PencilError::NotPrime(p));
        }
        if m == 0 {
            return Err(PencilError::BadExtensionDegree(m));
        }
        if m == 1 {
            return Gf::prime_field(p);
        }
        let modulus = least_irreducible(p, m)?;
        Ok(Gf { p, m, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.m as u32)
    }

    /// The modulus as a human-readable polynomial in `w`.
    pub fn modulus_string(&self) -> String {
        if self.m == 1 {
            return "w".to_string(); // degenerate; callers only print this for m > 1
        }
        poly_string(&self.modulus)
    }

    pub fn zero(&self) -> GfElement {
        GfElement(vec![0; self.m])
    }

    pub fn one(&self) -> GfElement {
        self.from_int(1)
    }

    /// Embeds an integer (i.e. a prime-field value) into the field.
    pub fn from_int(&self, n: i64) -> GfElement {
        let p = self.p as i64;
        let mut c = vec![0u64; self.m];
        c[0] = n.rem_euclid(p) as u64;
        GfElement(c)
    }

    /// The generator `w` (for m = 1, just the scalar... there is none; only
    /// meaningful for m >= 2).
    pub fn generator(&self) -> GfElement {
        let mut c = vec![0u64; self.m];
        if self.m >= 2 {
            c[1] = 1;
        } else {
            c[0] = self.p.min(2) % self.p; // unused in practice
        }
        GfElement(c)
    }

    pub fn is_zero(&self, a: &GfElement) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    /// True when the element lies in the prime subfield.
    pub fn in_prime_field(&self, a: &GfElement) -> bool {
        a.0.iter().skip(1).all(|&c| c == 0)
    }

    pub fn add(&self, a: &GfElement, b: &GfElement) -> GfElement {
        GfElement(
            a.0.iter()
                .zip(b.0.iter())
                .map(|(&x, &y)| (x + y) % self.p)
                .collect(),
        )
    }

    pub fn sub(&self, a: &GfElement, b: &GfElement) -> GfElement {
        GfElement(
            a.0.iter()
                .zip(b.0.iter())
                .map(|(&x, &y)| (x + self.p - y) % self.p)
                .collect(),
        )
    }

    pub fn neg(&self, a: &GfElement) -> GfElement {
        GfElement(a.0.iter().map(|&x| (self.p - x) % self.p).collect())
    }

    pub fn mul(&self, a: &GfElement, b: &GfElement) -> GfElement {
        // Schoolbook product then reduction by the monic modulus.
        let mut prod = vec![0u64; 2 * self.m - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        self.reduce(prod)
    }

    fn reduce(&self, mut poly: Vec<u64>) -> GfElement {
        // modulus = x^m + r(x) with deg r < m, so x^m = -r(x).
        for i in (self.m..poly.len()).rev() {
            let c = poly[i];
            if c == 0 {
                continue;
            }
            poly[i] = 0;
            for j in 0..self.m {
                let sub = (c * self.modulus[j]) % self.p;
                poly[i - self.m + j] = (poly[i - self.m + j] + self.p * self.p - sub) % self.p;
            }
        }
        poly.truncate(self.m);
        GfElement(poly)
    }

    pub fn pow(&self, a: &GfElement, mut e: u64) -> GfElement {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: &GfElement) -> Option<GfElement> {
        if self.is_zero(a) {
            return None;
        }
        // Fermat: a^(q-2) with q = p^m. Fields here are desk-scale.
        Some(self.pow(a, self.order() - 2))
    }

    /// All field elements in a fixed order: coefficient odometer with the
    /// constant coefficient fastest, i.e. by the integer encoding
    /// `c_0 + c_1 p + c_2 p^2 + ...` ascending.
    pub fn elements(&self) -> impl Iterator<Item = GfElement> + '_ {
        (0..self.order()).map(move |mut n| {
            let mut c = vec![0u64; self.m];
            for slot in c.iter_mut() {
                *slot = n % self.p;
                n /= self.p;
            }
            GfElement(c)
        })
    }

    /// Canonical text form: prime-field values print as integers, extension
    /// elements as polynomials in `w` with high powers first (`2w+3`,
    /// `w^2+4w`, ...).
    pub fn element_string(&self, a: &GfElement) -> String {
        if self.m == 1 {
            return a.0[0].to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        for (i, &c) in a.0.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let var = match i {
                0 => String::new(),
                1 => "w".to_string(),
                _ => format!("w^{i}"),
            };
            let part = if i == 0 {
                c.to_string()
            } else if c == 1 {
                var
            } else {
                format!("{c}{var}")
            };
            parts.push(part);
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join("+")
        }
    }
}

/// Renders a little-endian coefficient vector as a polynomial in `w`.
fn poly_string(coeffs: &[u64]) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let var = match i {
            0 => String::new(),
            1 => "w".to_string(),
            _ => format!("w^{i}"),
        };
        let part = if i == 0 {
            c.to_string()
        } else if c == 1 {
            var
        } else {
            format!("{c}{var}")
        };
        parts.push(part);
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join("+")
    }
}

// ---- modulus search: dense univariate arithmetic over F_p ----

/// Multiplication of little-endian polynomials modulo a monic `f`, over F_p.
fn polymulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let m = f.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for i in (m..prod.len()).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for j in 0..m {
            let sub = (c * f[j]) % p;
            prod[i - m + j] = (prod[i - m + j] + p * p - sub) % p;
        }
    }
    prod.truncate(m.max(1));
    prod
}

/// `x^e mod f` by square-and-multiply.
fn polyxpowmod(mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let m = f.len() - 1;
    let mut base = if m == 1 {
        // x mod (x + c) = -c.
        vec![(p - f[0] % p) % p]
    } else {
        vec![0u64; m]
    };
    if m > 1 {
        base[1] = 1; // the polynomial x
    }
    let mut acc = vec![0u64; m.max(1)];
    acc[0] = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = polymulmod(&acc, &base, f, p);
        }
        base = polymulmod(&base, &base, f, p);
        e >>= 1;
    }
    acc
}

fn poly_trim(a: &[u64]) -> &[u64] {
    let mut n = a.len();
    while n > 0 && a[n - 1] == 0 {
        n -= 1;
    }
    &a[..n]
}

/// Monic gcd over F_p.
fn polygcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x: Vec<u64> = poly_trim(a).to_vec();
    let mut y: Vec<u64> = poly_trim(b).to_vec();
    while !y.is_empty() {
        // x mod y
        let ly = *y.last().unwrap();
        let ly_inv = mod_inv(ly, p);
        while x.len() >= y.len() && !x.is_empty() {
            let lx = *x.last().unwrap();
            if lx == 0 {
                x.pop();
                continue;
            }
            let shift = x.len() - y.len();
            let factor = (lx * ly_inv) % p;
            for (i, &c) in y.iter().enumerate() {
                let sub = (factor * c) % p;
                x[shift + i] = (x[shift + i] + p * p - sub) % p;
            }
            while let Some(&0) = x.last() {
                x.pop();
            }
        }
        std::mem::swap(&mut x, &mut y);
    }
    // Normalize monic.
    if let Some(&l) = x.last() {
        let li = mod_inv(l, p);
        for c in x.iter_mut() {
            *c = (*c * li) % p;
        }
    }
    x
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // p is prime and small; Fermat.
    let mut e = p - 2;
    let mut base = a % p;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// Rabin's irreducibility test for a monic polynomial of degree m over F_p:
/// irreducible iff x^(p^m) = x mod f and gcd(x^(p^(m/q)) - x, f) = 1 for
/// every prime q dividing m.
fn rabin_irreducible(f: &[u64], p: u64) -> bool {
    let m = (f.len() - 1) as u64;
    let xq = polyxpowmod(p.pow(m as u32), f, p);
    // x^(p^m) - x must be 0 mod f.
    let mut diff = xq.clone();
    if diff.len() < 2 {
        diff.resize(2, 0);
    }
    diff[1] = (diff[1] + p - 1) % p;
    if !poly_trim(&diff).is_empty() {
        return false;
    }
    let mut primes = Vec::new();
    let mut n = m;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            primes.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        primes.push(n);
    }
    for q in primes {
        let e = p.pow((m / q) as u32);
        let mut g = polyxpowmod(e, f, p);
        if g.len() < 2 {
            g.resize(2, 0);
        }
        g[1] = (g[1] + p - 1) % p;
        let gcd = polygcd(&g, f, p);
        if gcd.len() != 1 {
            return false;
        }
    }
    true
}

/// The canonical modulus: enumerate monic degree-m polynomials by their
/// coefficient tuple (top coefficient first) in ascending lexicographic
/// order and return the first irreducible one.
fn least_irreducible(p: u64, m: usize) -> Result<Vec<u64>, PencilError> {
    let count = p.pow(m as u32);
    for n in 0..count {
        // Decode n as the tuple (c_{m-1}, ..., c_1, c_0), most significant
        // digit = top coefficient, so lower n means lexicographically
        // smaller from the top down.
        let mut coeffs = vec![0u64; m + 1];
        coeffs[m] = 1;
        let mut rest = n;
        for i in 0..m {
            coeffs[i] = rest % p; // c_0 varies fastest
            rest /= p;
        }
        if rabin_irreducible(&coeffs, p) {
            return Ok(coeffs);
        }
    }
    Err(PencilError::NoIrreducibleModulus { p, m })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_moduli_are_pinned() {
        // F_25 = F_5[w]/(w^2 + 2), F_125 = F_5[w]/(w^3 + w + 1).
        let f25 = Gf::extension(5, 2).unwrap();
        assert_eq!(f25.modulus_string(), "w^2+2");
        let f125 = Gf::extension(5, 3).unwrap();
        assert_eq!(f125.modulus_string(), "w^3+w+1");
        // F_49: w^2 + 1 works since -1 is not a square mod 7.
        let f49 = Gf::extension(7, 2).unwrap();
        assert_eq!(f49.modulus_string(), "w^2+1");
        // F_4: the unique irreducible quadratic over F_2.
        let f4 = Gf::extension(2, 2).unwrap();
        assert_eq!(f4.modulus_string(), "w^2+w+1");
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(Gf::prime_field(6).unwrap_err(), PencilError::NotPrime(6));
        assert_eq!(Gf::prime_field(1).unwrap_err(), PencilError::NotPrime(1));
        assert_eq!(Gf::extension(4, 2).unwrap_err(), PencilError::NotPrime(4));
        assert_eq!(Gf::extension(5, 0).unwrap_err(), PencilError::BadExtensionDegree(0));
    }

    #[test]
    fn prime_field_arithmetic() {
        let f5 = Gf::prime_field(5).unwrap();
        let three = f5.from_int(3);
        let four = f5.from_int(4);
        assert_eq!(f5.add(&three, &four), f5.from_int(2));
        assert_eq!(f5.mul(&three, &four), f5.from_int(2));
        assert_eq!(f5.neg(&three), f5.from_int(2));
        assert_eq!(f5.from_int(-1), f5.from_int(4));
        assert_eq!(f5.inv(&three), Some(f5.from_int(2)));
        assert_eq!(f5.inv(&f5.zero()), None);
    }

    #[test]
    fn every_nonzero_element_has_an_inverse() {
        for (p, m) in [(5, 2), (5, 3), (7, 2), (3, 2), (2, 3)] {
            let gf = Gf::extension(p, m).unwrap();
            let mut count = 0;
            for a in gf.elements() {
                if gf.is_zero(&a) {
                    continue;
                }
                let ai = gf.inv(&a).expect("nonzero element must invert");
                assert_eq!(gf.mul(&a, &ai), gf.one(), "inverse failed in F_{}^{}", p, m);
                count += 1;
            }
            assert_eq!(count as u64, gf.order() - 1);
        }
    }

    #[test]
    fn frobenius_fixes_exactly_the_prime_field() {
        let gf = Gf::extension(5, 2).unwrap();
        let fixed: Vec<GfElement> =
            gf.elements().filter(|a| gf.pow(a, 5) == *a).collect();
        assert_eq!(fixed.len(), 5);
        assert!(fixed.iter().all(|a| gf.in_prime_field(a)));
    }

    #[test]
    fn generator_satisfies_the_modulus() {
        // In F_25 with w^2 + 2 = 0: w^2 = -2 = 3.
        let gf = Gf::extension(5, 2).unwrap();
        let w = gf.generator();
        assert_eq!(gf.mul(&w, &w), gf.from_int(3));
        // In F_125 with w^3 + w + 1 = 0: w^3 = -w - 1 = 4w + 4.
        let gf3 = Gf::extension(5, 3).unwrap();
        let w = gf3.generator();
        let w3 = gf3.mul(&gf3.mul(&w, &w), &w);
        let expect = gf3.add(
            &gf3.mul(&gf3.from_int(4), &w),
            &gf3.from_int(4),
        );
        assert_eq!(w3, expect);
    }

    #[test]
    fn element_strings_are_readable() {
        let gf = Gf::extension(5, 2).unwrap();
        assert_eq!(gf.element_string(&gf.zero()), "0");
        assert_eq!(gf.element_string(&gf.from_int(3)), "3");
        assert_eq!(gf.element_string(&gf.generator()), "w");
        let mixed = gf.add(&gf.mul(&gf.from_int(2), &gf.generator()), &gf.from_int(3));
        assert_eq!(gf.element_string(&mixed), "2w+3");
    }

    #[test]
    fn element_order_is_the_integer_encoding() {
        let gf = Gf::extension(3, 2).unwrap();
        let all: Vec<String> = gf.elements().map(|a| gf.element_string(&a)).collect();
        assert_eq!(
            all,
            vec!["0", "1", "2", "w", "w+1", "w+2", "2w", "2w+1", "2w+2"]
        );
    }
}
