use super::*;
use crate::checks;

fn defaults() -> GroupParams {
    GroupParams::default()
}

fn g(id: GroupId) -> GroupModel {
    get_group(id, &defaults()).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

#[test]
fn catalog_has_fifteen_distinct_ids() {
    assert_eq!(GroupId::ALL.len(), 15);
    for (k, id) in GroupId::ALL.iter().enumerate() {
        assert_eq!(id.index(), k);
        assert_eq!(id.as_str().parse::<GroupId>().unwrap(), *id);
    }
    assert!("G4-II".parse::<GroupId>().is_ok());
    assert!(matches!(
        "nosuch".parse::<GroupId>(),
        Err(CatalogError::UnknownGroup(_))
    ));
}

#[test]
fn g4_i_constants() {
    let m = g(GroupId::G4_I_cne1);
    assert_eq!(m.constants.get(0, 0, 3), 2.0);
    assert_eq!(m.constants.get(0, 1, 2), 1.0);
    assert_eq!(m.constants.get(1, 1, 3), 1.0);
    assert_eq!(m.constants.get(2, 2, 3), 1.0);
    assert_eq!(m.constants.get(0, 3, 0), -2.0);
    assert!(m.constants.is_antisymmetric());
}

#[test]
fn viii_a_first_frame_line() {
    let m = g(GroupId::G4_VIII_a);
    let u = ChartPoint([std::f64::consts::FRAC_PI_2, 0.3, -0.2, 0.1]);
    let row: Vec<f64> = m.chart.frame.xi[0]
        .iter()
        .map(|e| e.eval(&u).unwrap())
        .collect();
    assert_eq!(row, vec![0.0, 1.0, 0.0, 0.0]);
    let nz = m.constants.nonzero();
    assert!(nz.contains(&(3, 1, 2, 1.0)));
    assert!(nz.contains(&(1, 2, 3, 1.0)));
    // C^2_31 = 1 appears as C^2_13 = -1 in the α<β listing
    assert!(nz.contains(&(2, 1, 3, -1.0)));
}

#[test]
fn parameter_constraints() {
    let mut p = defaults();
    p.c = 1.0;
    assert!(matches!(
        get_group(GroupId::G4_I_cne1, &p),
        Err(CatalogError::InvalidParams { .. })
    ));
    assert!(get_group(GroupId::G4_I_ceq1, &p).is_ok());
    let mut p = defaults();
    p.eps01 = 0.5;
    assert!(get_group(GroupId::G4_VI_1, &p).is_err());
    let mut p = defaults();
    p.alpha_angle = 0.0;
    assert!(get_group(GroupId::G4_III, &p).is_err());
    let mut p = defaults();
    p.k = 1.0;
    assert!(get_group(GroupId::G4_VI_4_1, &p).is_err());
    assert!(get_group(GroupId::G4_VI_4_2, &p).is_ok());
    let mut p = defaults();
    p.em_alphas[1] = f64::NAN;
    assert!(get_group(GroupId::G4_II, &p).is_err());
}

#[test]
fn sampling_is_deterministic_and_in_domain() {
    let m = g(GroupId::G4_VIII_b);
    let a = sample_points(&m.domain, 100, 42);
    let b = sample_points(&m.domain, 100, 42);
    assert_eq!(a, b);
    assert!(a.iter().all(|u| m.domain.contains(u)));
    assert!(a.iter().all(|u| u.0[0].sin() > 0.19));
    assert_ne!(a, sample_points(&m.domain, 100, 43));
    assert!(sample_points(&m.domain, 0, 1).is_empty());
}

#[test]
fn g4_i_potential_at_origin() {
    let m = g(GroupId::G4_I_cne1);
    assert_eq!(potential(&m, &ChartPoint::ORIGIN).unwrap(), [1.0; DIM]);
    let mut p = defaults();
    p.em_alphas = [0.0; DIM];
    let z = get_group(GroupId::G4_I_cne1, &p).unwrap();
    assert_eq!(
        potential(&z, &ChartPoint([0.3, 0.1, -0.7, 1.2])).unwrap(),
        [0.0; DIM]
    );
}

#[test]
fn g4_i_tetrad_potential_matches_holonomic_table() {
    let m = g(GroupId::G4_I_cne1);
    for u in sample_points(&m.domain, 100, 7) {
        let a = potential(&m, &u).unwrap();
        let b = potential_from_tetrad(&m, &u).unwrap();
        for i in 0..DIM {
            assert!(close(a[i], b[i], 1e-12), "{u:?}: {a:?} vs {b:?}");
        }
    }
}

#[test]
fn g4_ii_tetrad_potential_at_origin() {
    // A1 = −α3 under the selected orientation
    let a = potential_from_tetrad(&g(GroupId::G4_II), &ChartPoint::ORIGIN).unwrap();
    assert!(close(a[0], -1.0, 1e-15));
}

#[test]
fn orientation_decisions() {
    let m = g(GroupId::G4_II);
    assert_eq!(m.orientation.decided_by, DecidedBy::HolonomicTable);
    assert_eq!(m.orientation.orientation, Orientation::SubscriptRows);
    // deterministic
    assert_eq!(g(GroupId::G4_II).orientation, m.orientation);

    // an identity tetrad reads the same either way
    let mut flat = m.clone();
    let id: ExprMat = std::array::from_fn(|i| {
        std::array::from_fn(|j| Expr::constant(if i == j { 1.0 } else { 0.0 }))
    });
    flat.chart.tetrad = Tetrad::new(id.clone(), id, TetradSource::Derived);
    flat.chart.frame.xi = flat.chart.tetrad.stored_con.clone();
    flat.holonomic.chart = ChartSel::Companion;
    flat.companion = None;
    assert!(matches!(
        orient_tetrad(&flat),
        Err(OrientationError::Ambiguous(_))
    ));
}

#[test]
fn every_frame_is_dual_to_its_inverse() {
    for id in GroupId::ALL {
        let m = g(id);
        let pts = sample_points(&m.domain, 50, 11);
        let r = checks::duality_residual(&m.chart.frame, &pts).unwrap();
        assert!(r <= 1e-12, "{id}: {r}");
        let t = checks::tetrad_duality_residual(&m.chart.tetrad, &pts).unwrap();
        assert!(t <= 1e-12, "{id}: tetrad {t}");
    }
}

fn mat3_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

/// `exp(−C t)` by its power series, summed until terms vanish.
fn exp_neg_series(c: &[[f64; 3]; 3], t: f64) -> [[f64; 3]; 3] {
    let mut sum = [[0.0; 3]; 3];
    let mut term = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for n in 1..60 {
        for i in 0..3 {
            for j in 0..3 {
                sum[i][j] += term[i][j];
            }
        }
        let ct = c.map(|row| row.map(|x| -x * t / n as f64));
        term = mat3_mul(&term, &ct);
    }
    sum
}

#[test]
fn vi_closed_forms_match_power_series() {
    let ids = [
        GroupId::G4_VI_1,
        GroupId::G4_VI_2,
        GroupId::G4_VI_3,
        GroupId::G4_VI_4_1,
        GroupId::G4_VI_4_2,
    ];
    for eps in [0.0, 1.0] {
        let mut p = defaults();
        p.eps01 = eps;
        p.k = 0.7;
        p.l = -1.3;
        for id in ids {
            let cm = groups::vi_matrix(id, &p);
            let t = Expr::coord(3);
            let closed = groups::vi_exp_neg(id, &p, &t);
            for s in [-1.2, -0.3, 0.0, 0.5, 1.4] {
                let series = exp_neg_series(&cm, s);
                let u = ChartPoint([0.0, 0.0, 0.0, s]);
                for i in 0..3 {
                    for j in 0..3 {
                        let v = closed[i][j].eval(&u).unwrap();
                        assert!(
                            close(v, series[i][j], 1e-12),
                            "{id} eps={eps} t={s} [{i}][{j}]: {v} vs {}",
                            series[i][j]
                        );
                    }
                }
            }
        }
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn potential_is_linear_in_the_constants(
            a in prop::array::uniform4(-2.0f64..2.0),
            b in prop::array::uniform4(-2.0f64..2.0),
            u in prop::array::uniform4(-1.0f64..1.0),
            which in 0usize..15,
        ) {
            let m = g(GroupId::ALL[which]);
            let mut u = ChartPoint(u);
            if !m.domain.contains(&u) {
                u.0[0] = 1.5;
            }
            let sum: [f64; DIM] = std::array::from_fn(|k| a[k] + b[k]);
            let t = &m.holonomic.table;
            let (fa, fb, fs) = (t.eval(&a, &u).unwrap(), t.eval(&b, &u).unwrap(), t.eval(&sum, &u).unwrap());
            for i in 0..DIM {
                prop_assert!((fs[i] - fa[i] - fb[i]).abs() <= 1e-12 * (1.0 + fa[i].abs() + fb[i].abs()));
            }
        }
    }
}
