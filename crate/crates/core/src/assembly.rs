//! P1 finite element assembly in the electrode-constrained space.
//!
//! Degrees of freedom are mesh nodes, except that all nodes on one electrode
//! share a single DOF (the discrete space has constant traces on each
//! electrode). The assembled pieces are the conductivity-weighted stiffness
//! matrix, one interface mass matrix per partition arc, and the electrode
//! load matrix whose column `k` is the indicator of electrode `k`'s merged
//! DOF.
//!
//! Free nodes are numbered in mesh order (ring-major), electrode DOFs last;
//! that keeps the matrix envelope narrow for the skyline factorization.
//! Per-element contributions are computed independently and accumulated in
//! element order, so assembly is bit-reproducible.

use crate::exec;
use crate::geometry::Geometry;
use crate::mesh::{Mesh, Region};
use crate::numerics::{LinearCombo, SparseSym};
use crate::{Error, Result};
use nalgebra::DMatrix;
use std::io::{BufRead, Write};

/// Piecewise constant conductivity on the two subdomains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conductivity {
    pub sigma1: f64,
    pub sigma2: f64,
}

impl Default for Conductivity {
    fn default() -> Self {
        Conductivity {
            sigma1: 1.0,
            sigma2: 1.0,
        }
    }
}

impl Conductivity {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma1 > 0.0 && self.sigma2 > 0.0) {
            return Err(Error::Config(format!(
                "conductivities must be positive, got {} and {}",
                self.sigma1, self.sigma2
            )));
        }
        Ok(())
    }
}

/// Assembled finite element system.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    /// Number of degrees of freedom `D`.
    pub dof_count: usize,
    /// Partition arc count `n`.
    pub n: usize,
    /// Electrode count `m`.
    pub m: usize,
    /// Conductivity-weighted stiffness matrix (Neumann kernel = constants).
    pub stiffness: SparseSym,
    /// Interface mass matrices, one per partition arc, each supported on the
    /// DOFs of its arc.
    pub interface_mass: Vec<SparseSym>,
    /// Merged DOF index of each electrode; encodes the load matrix `P`.
    pub electrode_dofs: Vec<usize>,
    /// Node index to DOF index.
    pub dof_map: Vec<usize>,
    /// Sorted DOF indices lying on the interface circle.
    pub interface_dofs: Vec<usize>,
    combo: LinearCombo,
}

fn triangle_stiffness(coords: [[f64; 2]; 3], sigma: f64) -> Result<[[f64; 3]; 3]> {
    let [p1, p2, p3] = coords;
    let area2 = (p2[0] - p1[0]) * (p3[1] - p1[1]) - (p2[1] - p1[1]) * (p3[0] - p1[0]);
    if area2 <= 0.0 {
        return Err(Error::Assembly(format!(
            "triangle with non-positive twice-area {area2}"
        )));
    }
    // P1 gradients: b_i = y_j - y_k, c_i = x_k - x_j (cyclic)
    let b = [p2[1] - p3[1], p3[1] - p1[1], p1[1] - p2[1]];
    let c = [p3[0] - p2[0], p1[0] - p3[0], p2[0] - p1[0]];
    let f = sigma / (2.0 * area2);
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = f * (b[i] * b[j] + c[i] * c[j]);
        }
    }
    Ok(k)
}

/// Assembles the system for a mesh, geometry and conductivity.
pub fn assemble(mesh: &Mesh, geometry: &Geometry, sigma: &Conductivity) -> Result<AssembledSystem> {
    sigma.validate()?;
    let n = geometry.config.n;
    let m = geometry.config.m;

    // DOF merging: electrode nodes share one DOF placed after all free DOFs.
    let node_count = mesh.nodes.len();
    let mut electrode_of_node: Vec<Option<usize>> = vec![None; node_count];
    for k in 0..m {
        let nodes = mesh.electrode_nodes(k);
        if nodes.is_empty() {
            return Err(Error::Assembly(format!("electrode {} has no nodes", k + 1)));
        }
        for nd in nodes {
            electrode_of_node[nd] = Some(k);
        }
    }
    let free_count = electrode_of_node.iter().filter(|e| e.is_none()).count();
    let dof_count = free_count + m;
    let mut dof_map = vec![usize::MAX; node_count];
    let mut next = 0usize;
    for nd in 0..node_count {
        dof_map[nd] = match electrode_of_node[nd] {
            None => {
                let d = next;
                next += 1;
                d
            }
            Some(k) => free_count + k,
        };
    }
    let electrode_dofs: Vec<usize> = (0..m).map(|k| free_count + k).collect();

    // Stiffness: per-triangle local matrices in parallel, accumulated in
    // triangle order.
    let locals = exec::try_map_indexed(mesh.triangles.len(), |t| {
        let tri = &mesh.triangles[t];
        let coords = [
            mesh.nodes[tri.nodes[0]],
            mesh.nodes[tri.nodes[1]],
            mesh.nodes[tri.nodes[2]],
        ];
        let s = match tri.region {
            Region::Inner => sigma.sigma1,
            Region::Outer => sigma.sigma2,
        };
        triangle_stiffness(coords, s)
    })?;
    let mut stiff_trips: Vec<(usize, usize, f64)> = Vec::with_capacity(9 * mesh.triangles.len());
    for (t, local) in locals.iter().enumerate() {
        let tri = &mesh.triangles[t];
        for i in 0..3 {
            for j in 0..=i {
                let (di, dj) = (dof_map[tri.nodes[i]], dof_map[tri.nodes[j]]);
                stiff_trips.push((di, dj, local[i][j]));
                // merged DOFs can fold a true off-diagonal pair onto the
                // diagonal; both halves must then be counted
                if i != j && di == dj {
                    stiff_trips.push((di, dj, local[i][j]));
                }
            }
        }
    }
    let stiffness = SparseSym::from_triplets(dof_count, &stiff_trips);

    // Interface mass per partition arc: edge of length h contributes
    // h/6 · [[2, 1], [1, 2]] to its two DOFs.
    let mut mass_trips: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); n];
    for e in &mesh.interface_edges {
        let a = mesh.nodes[e.nodes[0]];
        let b = mesh.nodes[e.nodes[1]];
        let h = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        let (p, q) = (dof_map[e.nodes[0]], dof_map[e.nodes[1]]);
        let trips = &mut mass_trips[e.partition];
        trips.push((p, p, h / 3.0));
        trips.push((q, q, h / 3.0));
        trips.push((p, q, h / 6.0));
    }
    let interface_mass: Vec<SparseSym> = mass_trips
        .iter()
        .map(|t| SparseSym::from_triplets(dof_count, t))
        .collect();

    let mut interface_dofs: Vec<usize> = mesh
        .interface_edges
        .iter()
        .flat_map(|e| e.nodes)
        .map(|nd| dof_map[nd])
        .collect();
    interface_dofs.sort_unstable();
    interface_dofs.dedup();

    let refs: Vec<&SparseSym> = interface_mass.iter().collect();
    let combo = LinearCombo::new(stiffness.clone(), &refs)?;

    Ok(AssembledSystem {
        dof_count,
        n,
        m,
        stiffness,
        interface_mass,
        electrode_dofs,
        dof_map,
        interface_dofs,
        combo,
    })
}

impl AssembledSystem {
    /// Builds a system from raw parts (deserialization, synthetic test
    /// systems). The interface mass patterns must fit inside the stiffness
    /// pattern.
    pub fn from_parts(
        dof_count: usize,
        n: usize,
        m: usize,
        stiffness: SparseSym,
        interface_mass: Vec<SparseSym>,
        electrode_dofs: Vec<usize>,
        dof_map: Vec<usize>,
        interface_dofs: Vec<usize>,
    ) -> Result<Self> {
        if interface_mass.len() != n {
            return Err(Error::Domain(format!(
                "{} interface mass matrices for n = {n}",
                interface_mass.len()
            )));
        }
        if electrode_dofs.len() != m {
            return Err(Error::Domain(format!(
                "{} electrode DOFs for m = {m}",
                electrode_dofs.len()
            )));
        }
        let refs: Vec<&SparseSym> = interface_mass.iter().collect();
        let combo = LinearCombo::new(stiffness.clone(), &refs)?;
        Ok(AssembledSystem {
            dof_count,
            n,
            m,
            stiffness,
            interface_mass,
            electrode_dofs,
            dof_map,
            interface_dofs,
            combo,
        })
    }

    /// System matrix `A(γ)`, symmetric positive definite for `γ > 0`.
    pub fn system_matrix(&self, gamma: &[f64]) -> Result<SparseSym> {
        if gamma.len() != self.n {
            return Err(Error::Domain(format!(
                "gamma has {} components, system has n = {}",
                gamma.len(),
                self.n
            )));
        }
        if let Some(i) = gamma.iter().position(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(Error::Domain(format!(
                "gamma[{i}] = {} is not positive",
                gamma[i]
            )));
        }
        Ok(self.combo.evaluate(gamma))
    }

    /// Dense electrode load matrix `P` (`D × m`, indicator columns).
    pub fn load_matrix(&self) -> DMatrix<f64> {
        let mut p = DMatrix::zeros(self.dof_count, self.m);
        for (k, &d) in self.electrode_dofs.iter().enumerate() {
            p[(d, k)] = 1.0;
        }
        p
    }

    /// Writes the documented text container (dimension header, coordinate
    /// triplets per matrix, dense load matrix, DOF map).
    pub fn write_text<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "# corrocert system v1")?;
        writeln!(w, "dims {} {} {}", self.dof_count, self.n, self.m)?;
        let write_matrix = |w: &mut W, name: &str, mat: &SparseSym| -> std::io::Result<()> {
            writeln!(w, "matrix {} {}", name, mat.nnz())?;
            for (i, j, v) in mat.iter() {
                writeln!(w, "{} {} {:e}", i, j, v)?;
            }
            Ok(())
        };
        write_matrix(w, "stiffness", &self.stiffness)?;
        for (idx, mat) in self.interface_mass.iter().enumerate() {
            write_matrix(w, &format!("mass{}", idx + 1), mat)?;
        }
        writeln!(w, "load {} {}", self.dof_count, self.m)?;
        let p = self.load_matrix();
        for r in 0..self.dof_count {
            let row: Vec<String> = (0..self.m).map(|c| format!("{}", p[(r, c)])).collect();
            writeln!(w, "{}", row.join(" "))?;
        }
        writeln!(w, "dofmap {}", self.dof_map.len())?;
        for (nd, &d) in self.dof_map.iter().enumerate() {
            writeln!(w, "{} {}", nd, d)?;
        }
        Ok(())
    }

    /// Reads the text container written by [`AssembledSystem::write_text`].
    pub fn read_text<R: BufRead>(r: &mut R) -> Result<AssembledSystem> {
        let mut lines = r.lines();
        let mut next_line = || -> Result<String> {
            lines
                .next()
                .ok_or_else(|| Error::Parse("unexpected end of system file".into()))?
                .map_err(Error::from)
        };
        let header = next_line()?;
        if !header.starts_with("# corrocert system") {
            return Err(Error::Parse("missing system header".into()));
        }
        let dims = next_line()?;
        let parts: Vec<&str> = dims.split_whitespace().collect();
        if parts.len() != 4 || parts[0] != "dims" {
            return Err(Error::Parse(format!("bad dims line: {dims}")));
        }
        let dof_count: usize = parts[1].parse().map_err(|_| Error::Parse("bad D".into()))?;
        let n: usize = parts[2].parse().map_err(|_| Error::Parse("bad n".into()))?;
        let m: usize = parts[3].parse().map_err(|_| Error::Parse("bad m".into()))?;

        let mut read_matrix = |expect: &str| -> Result<SparseSym> {
            let head = next_line()?;
            let hp: Vec<&str> = head.split_whitespace().collect();
            if hp.len() != 3 || hp[0] != "matrix" || hp[1] != expect {
                return Err(Error::Parse(format!("expected matrix {expect}, got: {head}")));
            }
            let nnz: usize = hp[2].parse().map_err(|_| Error::Parse("bad nnz".into()))?;
            let mut trips = Vec::with_capacity(nnz);
            for _ in 0..nnz {
                let line = next_line()?;
                let f: Vec<&str> = line.split_whitespace().collect();
                if f.len() != 3 {
                    return Err(Error::Parse(format!("bad triplet line: {line}")));
                }
                let i: usize = f[0].parse().map_err(|_| Error::Parse("bad row".into()))?;
                let j: usize = f[1].parse().map_err(|_| Error::Parse("bad col".into()))?;
                let v: f64 = f[2].parse().map_err(|_| Error::Parse("bad value".into()))?;
                trips.push((i, j, v));
            }
            Ok(SparseSym::from_triplets(dof_count, &trips))
        };

        let stiffness = read_matrix("stiffness")?;
        let mut interface_mass = Vec::with_capacity(n);
        for idx in 0..n {
            interface_mass.push(read_matrix(&format!("mass{}", idx + 1))?);
        }

        let load_head = next_line()?;
        let lp: Vec<&str> = load_head.split_whitespace().collect();
        if lp.len() != 3 || lp[0] != "load" {
            return Err(Error::Parse(format!("expected load header, got: {load_head}")));
        }
        let mut electrode_dofs = vec![usize::MAX; m];
        for r in 0..dof_count {
            let line = next_line()?;
            for (c, tok) in line.split_whitespace().enumerate() {
                let v: f64 = tok.parse().map_err(|_| Error::Parse("bad load value".into()))?;
                if v == 1.0 {
                    if c >= m || electrode_dofs[c] != usize::MAX {
                        return Err(Error::Parse(format!(
                            "load column {c} is not an indicator column"
                        )));
                    }
                    electrode_dofs[c] = r;
                } else if v != 0.0 {
                    return Err(Error::Parse(format!("load entry {v} is neither 0 nor 1")));
                }
            }
        }
        if electrode_dofs.iter().any(|&d| d == usize::MAX) {
            return Err(Error::Parse("load matrix misses an electrode column".into()));
        }

        let map_head = next_line()?;
        let mp: Vec<&str> = map_head.split_whitespace().collect();
        if mp.len() != 2 || mp[0] != "dofmap" {
            return Err(Error::Parse(format!("expected dofmap header, got: {map_head}")));
        }
        let nodes: usize = mp[1].parse().map_err(|_| Error::Parse("bad node count".into()))?;
        let mut dof_map = vec![0usize; nodes];
        for _ in 0..nodes {
            let line = next_line()?;
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 2 {
                return Err(Error::Parse(format!("bad dofmap line: {line}")));
            }
            let nd: usize = f[0].parse().map_err(|_| Error::Parse("bad node".into()))?;
            let d: usize = f[1].parse().map_err(|_| Error::Parse("bad dof".into()))?;
            dof_map[nd] = d;
        }

        let mut interface_dofs: Vec<usize> = interface_mass
            .iter()
            .flat_map(|m| m.support())
            .collect();
        interface_dofs.sort_unstable();
        interface_dofs.dedup();

        AssembledSystem::from_parts(
            dof_count,
            n,
            m,
            stiffness,
            interface_mass,
            electrode_dofs,
            dof_map,
            interface_dofs,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_geometry, GeometryConfig};
    use crate::mesh::{generate_mesh, BoundaryTag};
    use crate::numerics::{min_eig, spd_factorize};

    fn system(n: usize, m: usize, refinement: u32) -> (AssembledSystem, crate::mesh::Mesh) {
        let g = build_geometry(&GeometryConfig::with_counts(n, m)).unwrap();
        let mesh = generate_mesh(&g, refinement).unwrap();
        let sys = assemble(&mesh, &g, &Conductivity::default()).unwrap();
        (sys, mesh)
    }

    #[test]
    fn stiffness_matches_naive_dense_assembly() {
        // independent oracle: per-triangle gradients from a 3x3 solve instead
        // of the closed-form cross products
        let (sys, mesh) = system(2, 4, 1);
        let d = sys.dof_count;
        let mut dense = DMatrix::<f64>::zeros(d, d);
        for tri in &mesh.triangles {
            let p: Vec<[f64; 2]> = tri.nodes.iter().map(|&nd| mesh.nodes[nd]).collect();
            let vand = nalgebra::Matrix3::new(
                p[0][0], p[0][1], 1.0, p[1][0], p[1][1], 1.0, p[2][0], p[2][1], 1.0,
            );
            let inv = vand.try_inverse().unwrap();
            let area = 0.5
                * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
                    - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]));
            for i in 0..3 {
                let gi = [inv[(0, i)], inv[(1, i)]];
                for j in 0..3 {
                    let gj = [inv[(0, j)], inv[(1, j)]];
                    let v = area * (gi[0] * gj[0] + gi[1] * gj[1]);
                    dense[(sys.dof_map[tri.nodes[i]], sys.dof_map[tri.nodes[j]])] += v;
                }
            }
        }
        let assembled = sys.stiffness.to_dense();
        let err = (&assembled - &dense).amax();
        assert!(err <= 1e-12, "entrywise mismatch {err}");
    }

    #[test]
    fn stiffness_annihilates_constants() {
        let (sys, _) = system(3, 5, 1);
        let ones = vec![1.0; sys.dof_count];
        let mut out = vec![0.0; sys.dof_count];
        sys.stiffness.mul_vec(&ones, &mut out);
        let worst = out.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        assert!(worst <= 1e-12, "row sums up to {worst}");
    }

    #[test]
    fn interface_mass_entries_match_edge_formula() {
        let (sys, mesh) = system(2, 4, 1);
        // off-diagonal of an interface edge is exactly h/6 (one edge per pair)
        let e = mesh.interface_edges[0];
        let a = mesh.nodes[e.nodes[0]];
        let b = mesh.nodes[e.nodes[1]];
        let h = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        let mat = &sys.interface_mass[e.partition];
        let (p, q) = (sys.dof_map[e.nodes[0]], sys.dof_map[e.nodes[1]]);
        assert!((mat.get(p, q) - h / 6.0).abs() <= 1e-15);
        // diagonal is the sum of h/3 over the node's edges within this arc
        let expected: f64 = mesh
            .interface_edges
            .iter()
            .filter(|ie| ie.partition == e.partition && ie.nodes.contains(&e.nodes[0]))
            .map(|ie| {
                let x = mesh.nodes[ie.nodes[0]];
                let y = mesh.nodes[ie.nodes[1]];
                ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt() / 3.0
            })
            .sum();
        assert!((mat.get(p, p) - expected).abs() <= 1e-15);
    }

    #[test]
    fn mass_sum_reproduces_arc_lengths() {
        let (sys, mesh) = system(4, 6, 2);
        // Σᵢ Bᵢ applied to the constant vector gives per-DOF half-sums of
        // adjacent interface edge lengths; its total is the polyline length.
        let ones = vec![1.0; sys.dof_count];
        let mut acc = vec![0.0; sys.dof_count];
        let mut out = vec![0.0; sys.dof_count];
        for mat in &sys.interface_mass {
            mat.mul_vec(&ones, &mut out);
            for (a, o) in acc.iter_mut().zip(&out) {
                *a += o;
            }
        }
        let total: f64 = acc.iter().sum();
        let polyline: f64 = mesh
            .interface_edges
            .iter()
            .map(|e| {
                let a = mesh.nodes[e.nodes[0]];
                let b = mesh.nodes[e.nodes[1]];
                ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
            })
            .sum();
        assert!((total - polyline).abs() <= 1e-12 * polyline);
        // and it is close to the interface circumference
        assert!((polyline - std::f64::consts::PI).abs() <= 0.01);
    }

    #[test]
    fn electrode_nodes_share_one_dof() {
        let (sys, mesh) = system(2, 4, 2);
        for k in 0..4 {
            let nodes = mesh.electrode_nodes(k);
            assert!(nodes.len() >= 2);
            for nd in nodes {
                assert_eq!(sys.dof_map[nd], sys.electrode_dofs[k]);
            }
        }
    }

    #[test]
    fn quadratic_form_matches_gauss_quadrature() {
        use rand::prelude::*;
        let (sys, mesh) = system(3, 5, 1);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let u: Vec<f64> = (0..sys.dof_count).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..sys.dof_count).map(|_| rng.random_range(-1.0..1.0)).collect();
        // 4-point Gauss-Legendre on each edge, integrating the product of
        // linear interpolants
        let gp = [
            (-0.861136311594053, 0.347854845137454),
            (-0.339981043584856, 0.652145154862546),
            (0.339981043584856, 0.652145154862546),
            (0.861136311594053, 0.347854845137454),
        ];
        for j in 0..3 {
            let mut quad = 0.0;
            for e in mesh.interface_edges.iter().filter(|e| e.partition == j) {
                let a = mesh.nodes[e.nodes[0]];
                let b = mesh.nodes[e.nodes[1]];
                let h = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
                let (du, dv) = (sys.dof_map[e.nodes[0]], sys.dof_map[e.nodes[1]]);
                for &(x, w) in &gp {
                    let t = 0.5 * (x + 1.0);
                    let uu = u[du] * (1.0 - t) + u[dv] * t;
                    let vv = v[du] * (1.0 - t) + v[dv] * t;
                    quad += w * 0.5 * h * uu * vv;
                }
            }
            let direct = sys.interface_mass[j].quad_form(&u, &v);
            assert!(
                (quad - direct).abs() <= 1e-10 * quad.abs().max(1.0),
                "arc {j}: quadrature {quad} vs assembled {direct}"
            );
        }
    }

    #[test]
    fn system_matrix_positive_definite_for_tiny_gamma() {
        let (sys, _) = system(2, 4, 1);
        let a = sys.system_matrix(&[1e-9, 1e-9]).unwrap();
        assert!(spd_factorize(&a).is_ok());
    }

    #[test]
    fn system_matrix_rejects_nonpositive_gamma() {
        let (sys, _) = system(2, 4, 1);
        assert!(sys.system_matrix(&[1.0, 0.0]).is_err());
        assert!(sys.system_matrix(&[1.0, -2.0]).is_err());
        assert!(sys.system_matrix(&[1.0]).is_err());
    }

    #[test]
    fn doubling_gamma_adds_psd_mass() {
        let (sys, _) = system(2, 4, 1);
        let g = [0.8, 2.5];
        let a1 = sys.system_matrix(&g).unwrap();
        let a2 = sys.system_matrix(&[1.6, 5.0]).unwrap();
        let mut diff = a2.to_dense() - a1.to_dense();
        diff = 0.5 * (&diff + diff.transpose());
        assert!(min_eig(&diff).unwrap() >= -1e-12);
        // equals Σ γᵢ Bᵢ by linearity
        let mut expected = DMatrix::zeros(sys.dof_count, sys.dof_count);
        for (i, mat) in sys.interface_mass.iter().enumerate() {
            expected += g[i] * mat.to_dense();
        }
        assert!((a2.to_dense() - a1.to_dense() - expected).amax() <= 1e-13);
    }

    #[test]
    fn storage_is_exactly_symmetric() {
        let (sys, _) = system(2, 4, 1);
        let a = sys.system_matrix(&[1.0, 2.0]).unwrap();
        for (i, j, v) in a.iter() {
            assert_eq!(a.get(j, i), v);
        }
    }

    #[test]
    fn missing_electrode_named_in_error() {
        let (_, mut mesh) = system(2, 4, 1);
        for e in &mut mesh.boundary_edges {
            if e.tag == BoundaryTag::Electrode(2) {
                e.tag = BoundaryTag::Insulated;
            }
        }
        let geometry = mesh.geometry.clone();
        let err = assemble(&mesh, &geometry, &Conductivity::default()).unwrap_err();
        assert!(err.to_string().contains("electrode 3"), "{err}");
    }

    #[test]
    fn coarse_and_desk_scale_dof_counts() {
        let (small, _) = system(2, 4, 1);
        assert!(small.dof_count <= 300, "coarse D = {}", small.dof_count);
        let (desk, _) = system(20, 30, 2);
        assert!(
            desk.dof_count >= 500 && desk.dof_count <= 2500,
            "desk D = {}",
            desk.dof_count
        );
    }

    #[test]
    fn text_roundtrip_preserves_system() {
        let (sys, _) = system(2, 4, 1);
        let mut buf = Vec::new();
        sys.write_text(&mut buf).unwrap();
        let back = AssembledSystem::read_text(&mut std::io::BufReader::new(&buf[..])).unwrap();
        assert_eq!(back.dof_count, sys.dof_count);
        assert_eq!(back.electrode_dofs, sys.electrode_dofs);
        assert_eq!(back.dof_map, sys.dof_map);
        assert_eq!(back.interface_dofs, sys.interface_dofs);
        let a = sys.system_matrix(&[1.3, 2.7]).unwrap();
        let b = back.system_matrix(&[1.3, 2.7]).unwrap();
        assert_eq!((a.to_dense() - b.to_dense()).amax(), 0.0);
    }
}
