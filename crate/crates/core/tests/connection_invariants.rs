use webrank::connection::{commutator_matrix, compute_connection, covariant_derivatives, ConnectionData};
use webrank::corpus::{generate_with, parse_builtin};
use webrank::engine::{assemble_systems, build_mtable, ordinariness_check, RecurrencePath, Systems, WebDims, WebJets};
use webrank::{sample_point, Error, JetMatrix, WebSpec};

const FAST_CORPUS: &[&str] = &[
    "bol",
    "hexagonal3",
    "example2",
    "pirio5",
    "pirio5:variant=product",
    "pirio6",
    "pirio7",
    "pirio8",
    "pereira_pirio:n=3",
];

struct AtPoint {
    dims: WebDims,
    jets: WebJets,
    sys: Systems,
    conn: ConnectionData,
}

fn at_point(web: &WebSpec, seed: u64) -> AtPoint {
    let dims = WebDims::new(web.n, web.d());
    for attempt in 0..20 {
        let p = sample_point(web.n, seed, attempt, 1000);
        let Ok(jets) = WebJets::evaluate(web, &p, dims.k0 + 1) else {
            continue;
        };
        let mt = build_mtable(&jets, dims.k0, RecurrencePath::First).unwrap();
        let sys = assemble_systems(&mt, &dims);
        assert!(ordinariness_check(&sys, &dims).ordinary);
        match compute_connection(&sys, &jets, &dims) {
            Ok(conn) => return AtPoint { dims, jets, sys, conn },
            Err(Error::SingularAtPoint { .. }) => continue,
            Err(e) => panic!("{e}"),
        }
    }
    panic!("no usable point");
}

fn web(name: &str) -> WebSpec {
    generate_with(&parse_builtin(name).unwrap(), 2).unwrap()
}

#[test]
fn kernel_stability_and_basis_expansion() {
    for name in FAST_CORPUS {
        let w = web(name);
        for seed in 0..2 {
            let a = at_point(&w, seed);
            assert!(a.sys.mm.matmul(&a.conn.triv.w).unwrap().is_zero(), "{name}: MM W != 0");
            for i in 0..a.dims.n {
                let n_i = covariant_derivatives(&a.conn.triv, &a.conn.u, &a.jets, &a.dims, i).unwrap();
                assert!(a.sys.mm.matmul(&n_i).unwrap().is_zero(), "{name}: MM nabla W != 0");
                // all alpha coordinates, not only the free ones
                let expanded = a.conn.triv.w.matmul(&a.conn.a[i]).unwrap();
                assert!(n_i.sub(&expanded).unwrap().is_zero(), "{name}: expansion mismatch");
            }
        }
    }
}

#[test]
fn commutator_cross_check() {
    for name in ["bol", "example2", "pirio8", "hexagonal3:G=nil"] {
        let w = web(name);
        let a = at_point(&w, 7);
        for (r, s, k) in &a.conn.k {
            let comm = commutator_matrix(&a.conn.triv, &a.conn.u, &a.jets, &a.dims, *r, *s).unwrap();
            assert!(comm.add(k).unwrap().is_zero(), "{name}: K({r},{s}) vs commutator");
        }
    }
}

#[test]
fn flatness_survives_reordering() {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for name in ["bol", "example2", "pirio6"] {
        let w = web(name);
        let mut checked = 0;
        for _ in 0..6 {
            let mut perm: Vec<usize> = (0..w.d()).collect();
            perm.shuffle(&mut rng);
            let pw = w.permuted(&perm);
            let dims = WebDims::new(pw.n, pw.d());
            let p = sample_point(pw.n, 3, 0, 1000);
            let jets = WebJets::evaluate(&pw, &p, dims.k0 + 1).unwrap();
            let mt = build_mtable(&jets, dims.k0, RecurrencePath::First).unwrap();
            let sys = assemble_systems(&mt, &dims);
            match compute_connection(&sys, &jets, &dims) {
                Ok(c) => {
                    assert!(c.is_flat(), "{name} under {perm:?}");
                    checked += 1;
                }
                Err(Error::SingularAtPoint { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
        assert!(checked > 0, "{name}: no permutation passed the YYY gate");
    }
}

#[test]
fn pirio8_invariant_prefix() {
    let w = web("pirio8");
    let a = at_point(&w, 0);
    assert!(!a.conn.is_flat());
    let prefix: Vec<usize> = (0..19).collect();
    let r = a.conn.subbundle(&prefix);
    assert!(r.invariant && r.flat_restriction);
    let twenty: Vec<usize> = (0..20).collect();
    assert!(!a.conn.subbundle(&twenty).flat_restriction);
}

#[test]
fn prolongation_identity() {
    let w = web("pirio6");
    let a = at_point(&w, 1);
    let lhs: JetMatrix = a.sys.pp.matmul(&a.conn.u).unwrap().add(&a.sys.qq).unwrap();
    assert!(lhs.is_zero());
    assert_eq!(a.conn.u.shape(), (6, 24));
}

#[test]
fn linear_web_has_constant_prolongation() {
    let w = webrank::parse_webfile("n = 2\nu: x\nu: y\nu: x + y\nu: x - y\nu: x + 2*y\n").unwrap();
    let a = at_point(&w, 0);
    for e in a.conn.u.entries() {
        let c = webrank::Jet::constant(e.space(), e.order(), e.residue().clone());
        assert_eq!(e, &c);
    }
}
