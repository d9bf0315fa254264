//! Newton diagrams of bivariate germs: the compact lower boundary of the
//! convex hull of supp(f) + (R+)^2, its edges and inclinations, principal
//! parts, Minkowski sums, and the order bound for substituting an arc
//! y = c*x^nu.
//!
//! Points are (i, j) = (x-exponent, y-exponent). Edges run from the endpoint
//! with the larger j to the one with the smaller j, so inclinations
//! (horizontal length over vertical height) strictly increase along the
//! polygon.

use alloc::string::String;
use alloc::vec::Vec;

use num_integer::Integer;

use crate::bivar::Bivar;
use crate::error::{Error, Result};
use crate::gf::Poly;
use crate::rat::{Rat, rat, rat_int};

/// One compact edge of a Newton polygon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    /// Endpoint with the larger y-exponent (smaller x-exponent).
    pub from: (Rat, Rat),
    /// Endpoint with the smaller y-exponent (larger x-exponent).
    pub to: (Rat, Rat),
}

impl Edge {
    /// Horizontal projection.
    pub fn length(&self) -> Rat {
        self.to.0 - self.from.0
    }

    /// Vertical projection.
    pub fn height(&self) -> Rat {
        self.from.1 - self.to.1
    }

    /// length / height.
    pub fn inclination(&self) -> Rat {
        self.length() / self.height()
    }
}

/// The compact boundary of conv(S + (R+)^2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonDiagram {
    /// Extreme points, ascending x-exponent and descending y-exponent.
    pub vertices: Vec<(Rat, Rat)>,
    /// Compact edges, inclination strictly increasing.
    pub edges: Vec<Edge>,
}

impl NewtonDiagram {
    /// Hull of an explicit finite point set.
    pub fn from_points(points: &[(Rat, Rat)]) -> Result<NewtonDiagram> {
        if points.is_empty() {
            return Err(Error::Degenerate(String::from(
                "newton diagram of empty support",
            )));
        }
        // keep only the least i for each j
        let mut best: Vec<(Rat, Rat)> = Vec::new();
        let mut pts = points.to_vec();
        pts.sort();
        for (i, j) in pts {
            match best.iter_mut().find(|(_, jj)| *jj == j) {
                Some(slot) => {
                    if i < slot.0 {
                        slot.0 = i;
                    }
                }
                None => best.push((i, j)),
            }
        }
        // top vertex: minimal i, and among those the smallest j; every other
        // point with j >= that is dominated and never on the compact boundary
        let i_min = best.iter().map(|p| p.0).min().unwrap();
        let j_top = best
            .iter()
            .filter(|p| p.0 == i_min)
            .map(|p| p.1)
            .min()
            .unwrap();
        let mut pts: Vec<(Rat, Rat)> = best
            .into_iter()
            .filter(|p| p.1 < j_top || (p.0 == i_min && p.1 == j_top))
            .collect();
        // walk downward in j, keeping a strictly convex chain; the pop test
        // also removes dominated points (they always fail convexity)
        pts.sort_by(|a, b| b.1.cmp(&a.1));
        let mut chain: Vec<(Rat, Rat)> = Vec::new();
        for p in pts {
            while chain.len() >= 2 {
                let last = chain[chain.len() - 1];
                let prev = chain[chain.len() - 2];
                // inclination prev->last must stay strictly below prev->p
                let lhs = (last.0 - prev.0) * (prev.1 - p.1);
                let rhs = (p.0 - prev.0) * (prev.1 - last.1);
                if lhs >= rhs {
                    chain.pop();
                } else {
                    break;
                }
            }
            chain.push(p);
        }
        let edges = chain
            .windows(2)
            .map(|w| Edge { from: w[0], to: w[1] })
            .collect();
        Ok(NewtonDiagram { vertices: chain, edges })
    }

    /// Support function min(i + nu*j) over the vertices.
    pub fn support_value(&self, nu: Rat) -> Rat {
        self.vertices
            .iter()
            .map(|&(i, j)| i + nu * j)
            .min()
            .expect("nonempty diagram")
    }

    /// Whether (a, b) lies in conv(vertices + (R+)^2).
    pub fn contains(&self, p: (Rat, Rat)) -> bool {
        let i_min = self.vertices.first().unwrap().0;
        let j_min = self.vertices.last().unwrap().1;
        if p.0 < i_min || p.1 < j_min {
            return false;
        }
        self.edges
            .iter()
            .all(|e| p.0 + e.inclination() * p.1 >= self.support_value(e.inclination()))
    }
}

/// Certified support of a germ: its exactly-known points, with an error if a
/// truncated coefficient could hide a point below the resulting hull.
fn certified_support(f: &Bivar) -> Result<(Vec<(Rat, Rat)>, Vec<(Rat, Rat)>)> {
    let mut pts = Vec::new();
    let mut unknown = Vec::new(); // (precision bound, j) of empty truncated coeffs
    for (j, s) in f.coeffs().iter().enumerate() {
        let j = rat_int(j as i128);
        match s.iter().next() {
            Some((e, _)) => pts.push((e, j)),
            None => {
                if let Some(p) = s.precision() {
                    unknown.push((p, j));
                }
            }
        }
    }
    Ok((pts, unknown))
}

/// Newton polygon of a nonzero germ. Truncated coefficients are fine as long
/// as the precision certifies the hull.
pub fn newton_polygon(f: &Bivar) -> Result<NewtonDiagram> {
    let (pts, unknown) = certified_support(f)?;
    if pts.is_empty() {
        return Err(if unknown.is_empty() {
            Error::Degenerate(String::from("newton polygon of zero germ"))
        } else {
            Error::PrecisionExhausted(String::from("no certified support points"))
        });
    }
    let nd = NewtonDiagram::from_points(&pts)?;
    for (p, j) in unknown {
        if !nd.contains((p, j)) {
            return Err(Error::PrecisionExhausted(String::from(
                "a truncated coefficient could sit below the hull",
            )));
        }
    }
    Ok(nd)
}

/// Sum of the terms of f supported on the segment e (which must be an edge
/// of the polygon of f).
pub fn principal_part(f: &Bivar, e: &Edge) -> Result<Bivar> {
    let nd = newton_polygon(f)?;
    if !nd.edges.contains(e) {
        return Err(Error::Degenerate(String::from("edge not on the polygon")));
    }
    let desc = f.field().clone();
    let nu = e.inclination();
    let level = e.from.0 + nu * e.from.1;
    let mut c = Vec::with_capacity(f.coeffs().len());
    for (j, s) in f.coeffs().iter().enumerate() {
        let jr = rat_int(j as i128);
        let mut keep = crate::series::Series::zero(&desc);
        if jr >= e.to.1 && jr <= e.from.1 {
            let i = level - nu * jr;
            if i >= rat_int(0) {
                for (ee, v) in s.iter() {
                    if ee == i {
                        keep = keep.add(&crate::series::Series::monomial(v.clone(), ee));
                    }
                }
            }
        }
        c.push(keep);
    }
    Ok(Bivar::from_coeffs(&desc, c))
}

/// The restriction of f to an edge, read as a univariate polynomial: with
/// inclination a/b (in lowest terms relative to the exponent lattice of f),
/// the terms on the edge are c_t * x^(i_L - nu*t*b) * y^(j_L + t*b) and the
/// returned data is (phi = sum c_t z^t, b, j_L).
pub struct EdgePoly {
    pub phi: Poly,
    /// Lattice step in the y-exponent between consecutive edge points.
    pub step: u64,
    /// y-exponent at the lower end of the edge.
    pub j_low: usize,
}

pub fn edge_polynomial(f: &Bivar, e: &Edge) -> Result<EdgePoly> {
    let desc = f.field().clone();
    let nu = e.inclination();
    // smallest positive integer step with nu*step on the exponent lattice;
    // empty coefficients carry no support and may keep a stale lattice from
    // earlier shifts, so they do not count
    let mut ram: i128 = 1;
    for s in f.coeffs() {
        if !s.is_empty() {
            ram = ram.lcm(&s.ram());
        }
    }
    let scaled = nu * rat(ram, 1);
    let step = *scaled.denom();
    let j_low = e.to.1.to_integer() as usize;
    let j_high = e.from.1.to_integer() as usize;
    let deg = (j_high - j_low) / step as usize;
    let i_low = e.to.0;
    let mut c = Vec::with_capacity(deg + 1);
    for t in 0..=deg {
        let j = j_low + t * step as usize;
        let i = i_low - nu * rat(t as i128 * step, 1);
        c.push(f.coeff(j).coeff(i)?);
    }
    Ok(EdgePoly { phi: Poly::from_coeffs(&desc, c), step: step as u64, j_low })
}

/// Lower bound for ord_x g(x, c*x^nu) from the supporting line of inclination
/// nu, and whether the bound is attained: it is exactly attained iff the
/// restriction of g to the supporting face does not vanish at y = c*x^nu.
pub fn arc_order(g: &Bivar, nu: Rat, c: &crate::gf::Fq) -> Result<(Rat, bool)> {
    if nu <= rat_int(0) {
        return Err(Error::Degenerate(String::from("arc order needs nu > 0")));
    }
    let (pts, unknown) = certified_support(g)?;
    if pts.is_empty() {
        return Err(Error::PrecisionExhausted(String::from(
            "no certified support points",
        )));
    }
    let a = pts.iter().map(|&(i, j)| i + nu * j).min().unwrap();
    for (p, j) in unknown {
        if p + nu * j <= a {
            return Err(Error::PrecisionExhausted(String::from(
                "supporting line not certified",
            )));
        }
    }
    // evaluate the face restriction at (1, c)
    let desc = g.field().clone();
    let mut face = desc.zero();
    for (j, s) in g.coeffs().iter().enumerate() {
        let jr = rat_int(j as i128);
        let i = a - nu * jr;
        if i < rat_int(0) {
            continue;
        }
        for (e, v) in s.iter() {
            if e == i {
                face = face.add(&v.mul(&c.pow(j as u64)));
            }
        }
    }
    Ok((a, !face.is_zero()))
}

/// Minkowski sum of diagrams: the diagram of the pointwise sum of the vertex
/// sets; satisfies polygon(f*g) = polygon(f) (+) polygon(g).
pub fn minkowski_sum(a: &NewtonDiagram, b: &NewtonDiagram) -> NewtonDiagram {
    let mut pts = Vec::with_capacity(a.vertices.len() * b.vertices.len());
    for &(i1, j1) in &a.vertices {
        for &(i2, j2) in &b.vertices {
            pts.push((i1 + i2, j1 + j2));
        }
    }
    NewtonDiagram::from_points(&pts).expect("nonempty sum")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldDescriptor;
    use alloc::sync::Arc;

    fn f5() -> Arc<FieldDescriptor> {
        FieldDescriptor::prime(5).unwrap()
    }

    #[test]
    fn cusp_polygon() {
        let d = f5();
        let f = Bivar::from_terms(&d, &[(0, 2, 1), (3, 0, 1)]);
        let nd = newton_polygon(&f).unwrap();
        assert_eq!(nd.vertices, alloc::vec![
            (rat_int(0), rat_int(2)),
            (rat_int(3), rat_int(0))
        ]);
        assert_eq!(nd.edges.len(), 1);
        assert_eq!(nd.edges[0].inclination(), rat(3, 2));
    }

    #[test]
    fn interior_point_above_edge() {
        let d = f5();
        // y^2 + 2x^2 y + x^3 + x^4: (2,1) lies strictly above the edge
        let f = Bivar::from_terms(&d, &[(0, 2, 1), (2, 1, 2), (3, 0, 1), (4, 0, 1)]);
        let nd = newton_polygon(&f).unwrap();
        assert_eq!(nd.edges.len(), 1);
        assert_eq!(nd.edges[0].inclination(), rat(3, 2));
        let pp = principal_part(&f, &nd.edges[0]).unwrap();
        let want = Bivar::from_terms(&d, &[(0, 2, 1), (3, 0, 1)]);
        assert_eq!(pp, want);
    }

    #[test]
    fn polygon_off_the_axis() {
        let d = f5();
        // y^3 + x^3 y: edge (0,3)-(3,1)
        let f = Bivar::from_terms(&d, &[(0, 3, 1), (3, 1, 1)]);
        let nd = newton_polygon(&f).unwrap();
        assert_eq!(nd.vertices, alloc::vec![
            (rat_int(0), rat_int(3)),
            (rat_int(3), rat_int(1))
        ]);
        assert_eq!(nd.edges[0].inclination(), rat(3, 2));
        let pp = principal_part(&f, &nd.edges[0]).unwrap();
        assert_eq!(pp, f);
    }

    #[test]
    fn arc_order_cases() {
        let d = f5();
        let g = Bivar::from_terms(&d, &[(0, 2, 1), (3, 0, 1)]);
        // nu=1, c=1: supporting line hits the vertex (0,2); substitution exact
        let (a, exact) = arc_order(&g, rat_int(1), &d.one()).unwrap();
        assert_eq!(a, rat_int(2));
        assert!(exact);
        // nu=1, c=0: face vanishes
        let (a, exact) = arc_order(&g, rat_int(1), &d.zero()).unwrap();
        assert_eq!(a, rat_int(2));
        assert!(!exact);
        // nu=3/2, c=2 in GF(5): 2^2+1 = 0, face vanishes on the edge itself
        let (a, exact) = arc_order(&g, rat(3, 2), &d.from_u64(2)).unwrap();
        assert_eq!(a, rat_int(3));
        assert!(!exact);
        // cross-check exact case against direct substitution
        let alpha = crate::series::Series::monomial(d.one(), rat_int(1));
        let v = g.eval_series(&alpha);
        assert_eq!(v.ord().unwrap(), crate::rat::ExtRat::finite(2, 1));
    }

    #[test]
    fn minkowski_of_product() {
        let d = f5();
        let f = Bivar::from_terms(&d, &[(0, 2, 1), (3, 0, 1)]);
        let g = Bivar::from_terms(&d, &[(0, 3, 1), (4, 0, 1)]);
        let nf = newton_polygon(&f).unwrap();
        let ng = newton_polygon(&g).unwrap();
        let prod = newton_polygon(&f.mul(&g)).unwrap();
        assert_eq!(minkowski_sum(&nf, &ng), prod);
        // identity element and translation
        let one = newton_polygon(&Bivar::one(&d)).unwrap();
        assert_eq!(minkowski_sum(&nf, &one), nf);
        let y = newton_polygon(&Bivar::y(&d)).unwrap();
        let y2 = newton_polygon(&Bivar::y(&d).mul(&Bivar::y(&d))).unwrap();
        assert_eq!(minkowski_sum(&y, &y), y2);
    }

    #[test]
    fn edge_polynomial_of_ramified_edge() {
        let d = f5();
        // (y^2 - x^3)(y^2 - 2x^3) = y^4 - 3x^3 y^2 + 2x^6: inclination 3/2,
        // step 2, phi(z) = z^2 - 3z + 2 = (z-1)(z-2)
        let f = Bivar::from_terms(&d, &[(0, 4, 1), (3, 2, -3), (6, 0, 2)]);
        let nd = newton_polygon(&f).unwrap();
        assert_eq!(nd.edges.len(), 1);
        let ep = edge_polynomial(&f, &nd.edges[0]).unwrap();
        assert_eq!(ep.step, 2);
        assert_eq!(ep.j_low, 0);
        let want = Poly::from_coeffs(&d, alloc::vec![d.from_u64(2), d.from_i64(-3), d.one()]);
        assert_eq!(ep.phi, want);
    }

    #[test]
    fn truncated_coefficient_certification() {
        let d = f5();
        // f = y^2 + c0(x) with c0 truncated and empty below x^1: the missing
        // constant coefficient could sit below any hull through (0,2)
        let c0 = crate::series::Series::zero(&d).truncate(rat_int(1));
        let f = Bivar::from_coeffs(&d, alloc::vec![
            c0,
            crate::series::Series::zero(&d),
            crate::series::Series::one(&d)
        ]);
        assert!(matches!(
            newton_polygon(&f),
            Err(Error::PrecisionExhausted(_))
        ));
        // an unknown middle coefficient with enough precision sits strictly
        // inside the hull and the polygon is certified
        let c1 = crate::series::Series::zero(&d).truncate(rat_int(100));
        let f = Bivar::from_coeffs(&d, alloc::vec![
            crate::series::Series::monomial(d.one(), rat_int(2)),
            c1,
            crate::series::Series::one(&d)
        ]);
        let nd = newton_polygon(&f).unwrap();
        assert_eq!(nd.edges.len(), 1);
        assert_eq!(nd.edges[0].inclination(), rat_int(1));
    }
}
