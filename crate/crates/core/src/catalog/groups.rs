//! Catalog data. Every formula here is transcribed from the printed tables;
//! where a printed entry had to be repaired, the printed version is kept as
//! an [`Erratum`] so the report can show the discrepancy.

use super::*;
use crate::adiff::{cos, exp, sin};

fn k(x: f64) -> Expr {
    Expr::constant(x)
}

fn z() -> Expr {
    Expr::zero()
}

fn one() -> Expr {
    Expr::one()
}

fn frame(xi: ExprMat, dual: ExprMat) -> FrameField {
    FrameField { xi, dual }
}

fn chart(frame: FrameField, tetrad: Tetrad, metric_form: MetricForm) -> Chart {
    Chart {
        name: "primary",
        frame,
        tetrad,
        metric_form,
    }
}

/// Embed a 3×3 block and append a fourth row and column.
fn embed3(block: [[Expr; 3]; 3], row4: ExprVec) -> ExprMat {
    std::array::from_fn(|r| {
        if r < 3 {
            std::array::from_fn(|c| if c < 3 { block[r][c].clone() } else { z() })
        } else {
            row4.clone()
        }
    })
}

fn model(
    id: GroupId,
    params: &GroupParams,
    constants: StructureConstants,
    chart: Chart,
    holonomic: HolonomicTable,
    frame_table: Option<PotentialTable>,
) -> GroupModel {
    GroupModel {
        id,
        params: params.clone(),
        constants,
        chart,
        companion: None,
        holonomic,
        frame_table,
        domain: SampleDomain::cube(1.5),
        errata: Vec::new(),
        notes: Vec::new(),
        orientation: OrientationDecision::placeholder(),
    }
}

fn asserted(table: PotentialTable) -> HolonomicTable {
    HolonomicTable {
        table,
        chart: ChartSel::Primary,
        mode: Mode::Asserted,
    }
}

fn reported(table: PotentialTable) -> HolonomicTable {
    HolonomicTable {
        table,
        chart: ChartSel::Primary,
        mode: Mode::Report,
    }
}

pub(super) fn build(id: GroupId, p: &GroupParams) -> GroupModel {
    match id {
        GroupId::G4_I_cne1 => g4_i(id, p, p.c),
        GroupId::G4_I_ceq1 => g4_i(id, p, 1.0),
        GroupId::G4_II => g4_ii(p),
        GroupId::G4_III => g4_iii(p),
        GroupId::G4_IV => g4_iv(p),
        GroupId::G4_V => g4_v(p),
        GroupId::G4_VI_1
        | GroupId::G4_VI_2
        | GroupId::G4_VI_3
        | GroupId::G4_VI_4_1
        | GroupId::G4_VI_4_2 => g4_vi(id, p),
        GroupId::G4_VII_a | GroupId::G4_VII_b => g4_vii(id, p),
        GroupId::G4_VIII_a | GroupId::G4_VIII_b => g4_viii(id, p),
    }
}

/// G4(I); `c = 1` is the separate degenerate entry with ε = 0.
fn g4_i(id: GroupId, p: &GroupParams, c: f64) -> GroupModel {
    let [u1, u2, u3, u4] = Expr::coords();
    let eps = c - 1.0;
    let xi = [
        [z(), one(), z(), z()],
        [z(), z(), one(), z()],
        [k(-1.0), u3.clone(), z(), z()],
        [eps * &u1, c * &u2, u3.clone(), one()],
    ];
    let dual = [
        [u3.clone(), z(), k(-1.0), z()],
        [one(), z(), z(), z()],
        [z(), one(), z(), z()],
        [-(eps * &u1 * &u3 + c * &u2), -&u3, eps * &u1, one()],
    ];
    let constants = StructureConstants::from_entries(&[
        (1, 1, 4, c),
        (1, 2, 3, 1.0),
        (2, 2, 4, 1.0),
        (3, 3, 4, eps),
    ]);

    let e_eps = exp(-eps * &u4);
    let e_c = exp(-c * &u4);
    let e_1 = exp(-&u4);
    let cov = [
        [e_eps.clone(), z(), z(), z()],
        [z(), e_c.clone(), z(), z()],
        [z(), &u1 * &e_c, e_1.clone(), z()],
        [z(), z(), z(), one()],
    ];
    let con = [
        [exp(eps * &u4), z(), z(), z()],
        [z(), exp(c * &u4), z(), z()],
        [z(), -&u1 * exp(&u4), exp(&u4), z()],
        [z(), z(), z(), one()],
    ];
    let holo = PotentialTable::from_linear(|a| {
        [
            &a[0] * &e_eps,
            &a[1] * &e_c,
            &a[1] * &u1 * &e_c + &a[2] * &e_1,
            a[3].clone(),
        ]
    });

    let (frame_table, note) = if id == GroupId::G4_I_cne1 {
        let t = PotentialTable::from_linear(|a| {
            [
                &a[1] * &e_c,
                &a[1] * &u1 * &e_c + &a[2] * &e_1,
                &a[1] * &u3 * &e_c + &a[0] * &e_eps,
                &a[1] * (c * &u2 + &u1 * &u3) * &e_c - c * &a[0] * &u1 * &e_eps
                    + &a[2] * &u3 * &e_1
                    + &a[3],
            ]
        });
        (
            t,
            "printed frame components: the u1-term of A4 should carry eps*alpha1 (not c*alpha1), so the table fails the frame defining equations in the A4 row; alpha1 also enters with the opposite sign to the holonomic table",
        )
    } else {
        let t = PotentialTable::from_linear(|a| {
            [
                &a[1] * &e_1,
                (&a[1] * &u1 + &a[2]) * &e_1,
                -&a[0] + &a[1] * &u3 * &e_1,
                (&a[1] * (&u1 * &u3 + &u2) + &a[2] * &u3) * &e_1 + &a[3],
            ]
        });
        (t, "")
    };

    let mut m = model(
        id,
        p,
        constants,
        chart(
            frame(xi, dual),
            Tetrad::new(cov, con, TetradSource::Printed),
            MetricForm::Full,
        ),
        asserted(holo),
        Some(frame_table),
    );
    if !note.is_empty() {
        m.notes.push(note.into());
    }
    m
}

fn g4_ii(p: &GroupParams) -> GroupModel {
    let [u1, u2, u3, u4] = Expr::coords();
    let xi = [
        [z(), one(), z(), z()],
        [z(), z(), one(), z()],
        [k(-1.0), u3.clone(), z(), z()],
        [u1.clone(), 0.5 * (4.0 * &u2 + &u1 * &u1), &u3 - &u1, one()],
    ];
    let dual = [
        [u3.clone(), z(), k(-1.0), z()],
        [one(), z(), z(), z()],
        [z(), one(), z(), z()],
        [
            -(&u1 * &u3 + 2.0 * &u2 + 0.5 * &u1 * &u1),
            &u1 - &u3,
            u1.clone(),
            one(),
        ],
    ];
    let constants = StructureConstants::from_entries(&[
        (1, 1, 4, 2.0),
        (1, 2, 3, 1.0),
        (2, 2, 4, 1.0),
        (2, 3, 4, 1.0),
        (3, 3, 4, 1.0),
    ]);
    let e1 = exp(-&u4);
    let e2 = exp(-2.0 * &u4);
    let p1 = exp(&u4);
    let cov = [
        [z(), &u4 * &e1, -&e1, z()],
        [e2.clone(), z(), z(), z()],
        [&u1 * &e2, e1.clone(), z(), z()],
        [z(), z(), z(), one()],
    ];
    let con = [
        [z(), exp(2.0 * &u4), z(), z()],
        [z(), -&u1 * &p1, p1.clone(), z()],
        [-&p1, -&u1 * &u4 * &p1, &u4 * &p1, z()],
        [z(), z(), z(), one()],
    ];
    let holo = PotentialTable::from_linear(|a| {
        [
            (&a[1] * &u4 - &a[2]) * &e1,
            &a[0] * &e2,
            &a[0] * &u1 * &e2 + &a[1] * &e1,
            a[3].clone(),
        ]
    });
    let frame_table = PotentialTable::from_linear(|a| {
        let f1 = &a[0] * &e2;
        [
            f1.clone(),
            &u1 * &f1 + &a[1] * &e1,
            &u3 * &f1 - &a[1] * &u4 * &e1 + &a[2] * &e1,
            (&u1 * &u3 + 2.0 * &u2 - 0.5 * &u1 * &u1) * &f1 + &a[1] * (&u3 + &u1 * &u4 - &u1) * &e1
                - &a[2] * &u1 * &e1
                + &a[3],
        ]
    });
    model(
        GroupId::G4_II,
        p,
        constants,
        chart(
            frame(xi, dual),
            Tetrad::new(cov, con, TetradSource::Printed),
            MetricForm::Full,
        ),
        asserted(holo),
        Some(frame_table),
    )
}

fn g4_iii(p: &GroupParams) -> GroupModel {
    let [u1, u2, u3, u4] = Expr::coords();
    let (sa, ca) = p.alpha_angle.sin_cos();
    let alpha = p.alpha_angle;
    let xi = [
        [z(), one(), z(), z()],
        [z(), z(), one(), z()],
        [k(-1.0), u3.clone(), z(), z()],
        [
            2.0 * ca * &u1 - &u3,
            2.0 * ca * &u2 + 0.5 * (&u3 * &u3 - &u1 * &u1),
            u1.clone(),
            one(),
        ],
    ];
    let dual_rows = |half_sign: f64| {
        [
            [u3.clone(), z(), k(-1.0), z()],
            [one(), z(), z(), z()],
            [z(), one(), z(), z()],
            [
                half_sign * 0.5 * (&u1 * &u1 + &u3 * &u3) - 2.0 * ca * (&u1 * &u3 + &u2),
                -&u1,
                2.0 * ca * &u1 - &u3,
                one(),
            ],
        ]
    };
    let constants = StructureConstants::from_entries(&[
        (1, 1, 4, 2.0 * ca),
        (1, 2, 3, 1.0),
        (3, 2, 4, 1.0),
        (2, 3, 4, -1.0),
        (3, 3, 4, 2.0 * ca),
    ]);

    let w = sa * &u4;
    let wa = &w - alpha;
    let damp = exp(-ca * &u4);
    let grow = exp(ca * &u4);
    let damp2 = exp(-2.0 * ca * &u4);
    // printed tetrad: exp(-u4 cos a) * E and exp(u4 cos a) * E^-1
    let hat = [
        [z(), sin(&wa), cos(&wa), z()],
        [damp.clone(), z(), z(), z()],
        [&u1 * &damp, sin(&w), cos(&w), z()],
        [z(), z(), z(), grow.clone()],
    ];
    let hat_inv = [
        [z(), grow.clone(), z(), z()],
        [-cos(&w) / sa, -&u1 * cos(&wa) / sa, cos(&wa) / sa, z()],
        [sin(&w) / sa, &u1 * sin(&wa) / sa, -sin(&wa) / sa, z()],
        [z(), z(), z(), damp.clone()],
    ];
    let printed_cov: ExprMat = hat.map(|row| row.map(|e| &damp * e));
    let printed_con: ExprMat = hat_inv.map(|row| row.map(|e| &grow * e));
    // the u1 line of the covariant matrix (and the matching column of the
    // inverse) carries the wrong sign
    let mut cov = printed_cov.clone();
    cov[0] = cov[0].clone().map(|e| -e);
    let mut con = printed_con.clone();
    for row in con.iter_mut() {
        row[0] = -&row[0];
    }

    let holo = PotentialTable::from_linear(|a| {
        [
            &damp * (&a[0] * sin(&wa) + &a[1] * cos(&wa)),
            &a[2] * &damp2,
            &u1 * &a[2] * &damp2 + &damp * (&a[0] * sin(&w) + &a[1] * cos(&w)),
            z(),
        ]
    });
    let frame_table = PotentialTable::from_linear(|a| {
        let f1 = &a[0] * &damp2;
        let aa = &damp * (&a[1] * sin(&w) + &a[2] * cos(&w));
        let bb = &damp * (&a[1] * sin(&wa) + &a[2] * cos(&wa));
        [
            f1.clone(),
            &u1 * &f1 + &aa,
            &u3 * &f1 + &bb,
            &f1 * (2.0 * ca * &u2 + 0.5 * (&u1 * &u1 + &u3 * &u3))
                + &u1 * &aa
                + (2.0 * ca * &u1 - &u3) * &bb,
        ]
    });

    let mut m = model(
        GroupId::G4_III,
        p,
        constants,
        chart(
            frame(xi, dual_rows(1.0)),
            Tetrad::new(cov, con, TetradSource::Repaired),
            MetricForm::Full,
        ),
        reported(holo),
        Some(frame_table),
    );
    m.errata.push(Erratum::Dual {
        dual: dual_rows(-1.0),
        note: "printed dual frame: the (u1^2 + u3^2)/2 term of the u1 line has the wrong sign; the exact inverse is used",
    });
    m.errata.push(Erratum::Tetrad {
        tetrad: Tetrad::new(printed_cov, printed_con, TetradSource::Printed),
        note: "printed tetrad: the u1 line has the wrong sign and is not left-invariant; the sign-repaired tetrad is used",
    });
    m.notes.push(
        "printed holonomic table: A1 inherits the tetrad sign error (its negative is admissible); A4 = 0 and the alpha labels differ from the frame table".into(),
    );
    m.notes.push(
        "printed frame table: the inline A/B definitions are restated with different constant labels; the A4 component does not satisfy the frame defining equations".into(),
    );
    m
}

fn g4_iv(p: &GroupParams) -> GroupModel {
    let [u1, u2, u3, u4] = Expr::coords();
    let xi = [
        [z(), z(), one(), z()],
        [z(), one(), z(), z()],
        [k(-1.0), u2.clone(), z(), z()],
        [z(), z(), u3.clone(), one()],
    ];
    let dual = [
        [z(), u2.clone(), k(-1.0), z()],
        [z(), one(), z(), z()],
        [one(), z(), z(), z()],
        [-&u3, z(), z(), one()],
    ];
    let constants = StructureConstants::from_entries(&[(1, 1, 4, 1.0), (2, 2, 3, 1.0)]);
    let printed_constants = StructureConstants::from_entries(&[(2, 1, 4, 1.0), (2, 2, 3, 1.0)]);
    let cov = [
        [one(), z(), z(), z()],
        [z(), exp(&u1), z(), z()],
        [z(), z(), exp(-&u4), z()],
        [z(), z(), z(), one()],
    ];
    let con = [
        [one(), z(), z(), z()],
        [z(), exp(-&u1), z(), z()],
        [z(), z(), exp(&u4), z()],
        [z(), z(), z(), one()],
    ];
    // the undeclared constants of the printed table are read as alpha2, alpha3
    let holo =
        PotentialTable::from_linear(|a| [a[0].clone(), &a[1] * exp(&u1), &a[2] * exp(-&u4), z()]);
    let frame_table = PotentialTable::from_linear(|a| {
        let f1 = &a[2] * exp(-&u4);
        [
            f1.clone(),
            &a[1] * exp(&u1),
            &a[1] * &u2 * exp(&u1) - &a[2],
            &u3 * &f1 + &a[3],
        ]
    });
    let mut m = model(
        GroupId::G4_IV,
        p,
        constants,
        chart(
            frame(xi, dual),
            Tetrad::new(cov, con, TetradSource::Printed),
            MetricForm::Full,
        ),
        reported(holo),
        Some(frame_table),
    );
    m.errata.push(Erratum::Structure {
        constants: printed_constants,
        note: "printed structure constants list C^2_14 = 1; the printed frame gives [xi1, xi4] = xi1, i.e. C^1_14 = 1",
    });
    m.notes.push(
        "printed holonomic table uses undeclared constants (read as alpha2, alpha3) and sets A4 = 0, while the frame table has A4 = u3 A1 + alpha4".into(),
    );
    m
}

fn g4_v(p: &GroupParams) -> GroupModel {
    let [u1, u2, u3, u4] = Expr::coords();
    let xi = [
        [z(), one(), z(), z()],
        [z(), z(), one(), z()],
        [k(-1.0), u2.clone(), u3.clone(), z()],
        [z(), -&u3, u2.clone(), one()],
    ];
    let dual = [
        [u2.clone(), u3.clone(), k(-1.0), z()],
        [one(), z(), z(), z()],
        [z(), one(), z(), z()],
        [u3.clone(), -&u2, z(), one()],
    ];
    let constants = StructureConstants::from_entries(&[
        (1, 1, 3, 1.0),
        (2, 1, 4, 1.0),
        (2, 2, 3, 1.0),
        (1, 2, 4, -1.0),
    ]);
    let (c4, s4) = (cos(&u4), sin(&u4));
    let ep = exp(&u1);
    let em = exp(-&u1);
    let cov = [
        [one(), z(), z(), z()],
        [z(), &c4 * &ep, &s4 * &ep, z()],
        [z(), &s4 * &ep, -&c4 * &ep, z()],
        [z(), z(), z(), one()],
    ];
    let con = [
        [one(), z(), z(), z()],
        [z(), &c4 * &em, &s4 * &em, z()],
        [z(), &s4 * &em, -&c4 * &em, z()],
        [z(), z(), z(), one()],
    ];
    let holo = PotentialTable::from_linear(|a| {
        [
            a[0].clone(),
            (&a[1] * &c4 + &a[2] * &s4) * &ep,
            (&a[1] * &s4 - &a[2] * &c4) * &ep,
            a[3].clone(),
        ]
    });
    // frame table after relabelling alpha1 = a3, alpha2 = a1 cos a, alpha3 = -a1 sin a
    let frame_table = PotentialTable::from_linear(|a| {
        let f1 = (&a[1] * &c4 + &a[2] * &s4) * &ep;
        let f2 = (&a[1] * &s4 - &a[2] * &c4) * &ep;
        [
            f1.clone(),
            f2.clone(),
            -&a[0] + &u2 * &f1 + &u3 * &f2,
            &u2 * &f2 - &u3 * &f1 + &a[3],
        ]
    });
    let mut m = model(
        GroupId::G4_V,
        p,
        constants,
        chart(
            frame(xi, dual),
            Tetrad::new(cov, con, TetradSource::Printed),
            MetricForm::Full,
        ),
        asserted(holo),
        Some(frame_table),
    );
    m.notes.push(
        "constant relabelling assigns alpha1 twice; read as alpha1 = a3, alpha2 = a1 cos a, alpha3 = -a1 sin a, the only assignment under which the frame and holonomic tables agree".into(),
    );
    m
}

/// The 3×3 matrix `C_a^b` of the Abelian-subgroup family.
pub(crate) fn vi_matrix(id: GroupId, p: &GroupParams) -> [[f64; 3]; 3] {
    let (kk, l, e) = (p.k, p.l, p.eps01);
    match id {
        GroupId::G4_VI_1 => [[l, 0.0, 0.0], [0.0, e, 0.0], [0.0, 0.0, kk]],
        GroupId::G4_VI_2 => [[l, 0.0, 0.0], [0.0, kk, 1.0], [0.0, -1.0, kk]],
        GroupId::G4_VI_3 => [[e, 0.0, 0.0], [0.0, kk, 1.0], [0.0, 0.0, kk]],
        GroupId::G4_VI_4_1 => [[e, 0.0, 0.0], [0.0, kk, 1.0], [1.0, 0.0, kk]],
        GroupId::G4_VI_4_2 => [[kk, 0.0, 0.0], [0.0, kk, 1.0], [1.0, 0.0, kk]],
        _ => unreachable!("not an Abelian-subgroup entry"),
    }
}

/// `exp(−C t)` in closed form for each matrix of the family.
pub(super) fn vi_exp_neg(id: GroupId, p: &GroupParams, t: &Expr) -> [[Expr; 3]; 3] {
    let (kk, l, e) = (p.k, p.l, p.eps01);
    let ek = exp(-kk * t);
    match id {
        GroupId::G4_VI_1 => [
            [exp(-l * t), z(), z()],
            [z(), exp(-e * t), z()],
            [z(), z(), ek],
        ],
        GroupId::G4_VI_2 => [
            [exp(-l * t), z(), z()],
            [z(), &ek * cos(t), -&ek * sin(t)],
            [z(), &ek * sin(t), &ek * cos(t)],
        ],
        GroupId::G4_VI_3 => [
            [exp(-e * t), z(), z()],
            [z(), ek.clone(), -t * &ek],
            [z(), z(), ek.clone()],
        ],
        GroupId::G4_VI_4_1 => {
            let ee = exp(-e * t);
            let d = e - kk;
            [
                [ee.clone(), z(), z()],
                [(d * t * &ek - &ek + &ee) / (d * d), ek.clone(), -t * &ek],
                [(&ek - &ee) / (kk - e), z(), ek.clone()],
            ]
        }
        GroupId::G4_VI_4_2 => [
            [ek.clone(), z(), z()],
            [0.5 * t * t * &ek, ek.clone(), -t * &ek],
            [-t * &ek, z(), ek.clone()],
        ],
        _ => unreachable!("not an Abelian-subgroup entry"),
    }
}

fn g4_vi(id: GroupId, p: &GroupParams) -> GroupModel {
    let u = Expr::coords();
    let u4 = &u[3];
    let cm = vi_matrix(id, p);
    // xi4^q = C_p^q u^p
    let flow: [Expr; 3] =
        std::array::from_fn(|q| (0..3).fold(z(), |acc, pp| acc + cm[pp][q] * &u[pp]));
    let xi = std::array::from_fn(|r| {
        if r < 3 {
            std::array::from_fn(|c| if c == r { one() } else { z() })
        } else {
            [flow[0].clone(), flow[1].clone(), flow[2].clone(), one()]
        }
    });
    let dual = std::array::from_fn(|r| {
        if r < 3 {
            std::array::from_fn(|c| if c == r { one() } else { z() })
        } else {
            [-&flow[0], -&flow[1], -&flow[2], one()]
        }
    });
    let mut entries = Vec::new();
    for (a, row) in cm.iter().enumerate() {
        for (q, &v) in row.iter().enumerate() {
            if v != 0.0 {
                entries.push((q + 1, a + 1, 4, v));
            }
        }
    }
    let constants = StructureConstants::from_entries(&entries);

    // left-invariant coframe e^b = exp(-C u4)_{ab} du^a, e^4 = du4
    let decay = vi_exp_neg(id, p, u4);
    let growth = vi_exp_neg(id, p, &-u4);
    let cov = embed3(decay.clone(), [z(), z(), z(), one()]);
    let con = embed3(growth, [z(), z(), z(), one()]);

    // A_a = [exp(-C u4) alpha]_a, A4 = -C_p^a u^p A_a (no alpha4 term)
    let holo = PotentialTable::from_linear(|a| {
        let frame_a: [Expr; 3] =
            std::array::from_fn(|r| (0..3).fold(z(), |acc, b| acc + &decay[r][b] * &a[b]));
        let a4 = (0..3).fold(z(), |acc, r| acc - &flow[r] * &frame_a[r]);
        [
            frame_a[0].clone(),
            frame_a[1].clone(),
            frame_a[2].clone(),
            a4,
        ]
    });
    let frame_table = PotentialTable::from_linear(|a| {
        let frame_a: [Expr; 3] =
            std::array::from_fn(|r| (0..3).fold(z(), |acc, b| acc + &decay[r][b] * &a[b]));
        [
            frame_a[0].clone(),
            frame_a[1].clone(),
            frame_a[2].clone(),
            a[3].clone(),
        ]
    });

    let mut m = model(
        id,
        p,
        constants,
        chart(
            frame(xi, dual),
            Tetrad::new(cov, con, TetradSource::Derived),
            MetricForm::Full,
        ),
        reported(holo),
        Some(frame_table),
    );
    m.notes.push(
        "no tetrad is printed for this family; the left-invariant coframe exp(-C u4) du^a, du4 is used".into(),
    );
    m.notes.push(
        "printed holonomic potential is pure gauge (F = 0) but is not invariant under xi4: the frame equations force A_{4,a} = 0 where invariance needs A_{4,a} = C_a^b A_b".into(),
    );
    m
}

fn vii_block() -> ([[Expr; 3]; 3], [[Expr; 3]; 3]) {
    let [_, u2, u3, _] = Expr::coords();
    let e = exp(&u3);
    let em = exp(-&u3);
    let xi = [
        [z(), one(), z()],
        [z(), u2.clone(), one()],
        [e, &u2 * &u2, 2.0 * &u2],
    ];
    let dual = [
        [&u2 * &u2 * &em, -2.0 * &u2 * &em, em.clone()],
        [one(), z(), z()],
        [-&u2, one(), z()],
    ];
    (xi, dual)
}

fn g4_vii(id: GroupId, p: &GroupParams) -> GroupModel {
    let [u1, u2, u3, u4] = Expr::coords();
    let variant_b = id == GroupId::G4_VII_b;
    let (xi3, dual3) = vii_block();
    let (xi, dual) = if variant_b {
        (
            embed3(xi3, [one(), z(), z(), one()]),
            embed3(
                dual3.clone(),
                [-&dual3[0][0], -&dual3[0][1], -&dual3[0][2], one()],
            ),
        )
    } else {
        (
            embed3(xi3, [z(), z(), z(), one()]),
            embed3(dual3, [z(), z(), z(), one()]),
        )
    };
    let constants =
        StructureConstants::from_entries(&[(1, 1, 2, 1.0), (2, 1, 3, 2.0), (3, 2, 3, 1.0)]);

    let t = if variant_b { &u1 - &u4 } else { u1.clone() };
    let em = exp(-&u3);
    let tetrad_for = |square: Expr| {
        let cov = [
            [one(), z(), z(), z()],
            [square, -2.0 * &t * &em, em.clone(), z()],
            [-&t, one(), z(), z()],
            [if variant_b { k(-1.0) } else { z() }, z(), z(), one()],
        ];
        let con = [
            [one(), z(), z(), z()],
            [t.clone(), z(), one(), z()],
            [&t * &t, exp(&u3), 2.0 * &t, z()],
            [if variant_b { one() } else { z() }, z(), z(), one()],
        ];
        (cov, con)
    };
    let (cov, con) = tetrad_for(&t * &t * &em);
    let form = if variant_b {
        MetricForm::Full
    } else {
        MetricForm::Block3
    };

    if !variant_b {
        let holo = PotentialTable::from_linear(|a| {
            let q = &a[0] * &u1 * &u1 - 2.0 * &a[1] * &u1 + &a[2];
            [a[0].clone(), q * &em, -&a[0] * &u1 + &a[1], a[3].clone()]
        });
        let frame_table = PotentialTable::from_linear(|a| {
            let q = (&a[0] * &u1 * &u1 - 2.0 * &a[1] * &u1 + &a[2]) * &em;
            let lin = &a[0] * &u1 + &a[1];
            [
                q.clone(),
                &u2 * &q - &lin,
                &u2 * &u2 * &q - &u2 * &lin + &a[0] * exp(&u3),
                a[3].clone(),
            ]
        });
        let mut m = model(
            id,
            p,
            constants,
            chart(
                frame(xi, dual),
                Tetrad::new(cov, con, TetradSource::Printed),
                form,
            ),
            asserted(holo),
            Some(frame_table),
        );
        m.notes.push(
            "printed Killing-frame and dual-frame labels are swapped; the matrix printed as the dual is the Killing frame".into(),
        );
        m.notes.push(
            "printed frame table does not satisfy the frame defining equations of this frame; the holonomic table does".into(),
        );
        return m;
    }

    // Variant b. The printed holonomic table belongs to the companion
    // operators X1 = e^{-u3}(p1 - u2^2 p2 - 2 u2 p3), X2 = p3, X3 = e^{u3} p2,
    // X4 = p1 + p4, which carry the same structure constants.
    let (printed_cov, printed_con) = tetrad_for(&u2 * &em);
    let ep = exp(&u3);
    let xi_alt = [
        [em.clone(), -&u2 * &u2 * &em, -2.0 * &u2 * &em, z()],
        [z(), z(), one(), z()],
        [z(), ep.clone(), z(), z()],
        [one(), z(), z(), one()],
    ];
    let dual_alt = [
        [ep.clone(), 2.0 * &u2, &u2 * &u2 * &em, z()],
        [z(), z(), em.clone(), z()],
        [z(), one(), z(), z()],
        [-&ep, -2.0 * &u2, -&u2 * &u2 * &em, one()],
    ];
    // e^b_i = dA_i/d(alpha_b) of the printed table
    let alt_cov = [
        [one(), z(), z(), z()],
        [&t * &t, -2.0 * &t, one(), z()],
        [&t - &u2 * &t * &t, 2.0 * &u2 * &t - 1.0, -&u2, z()],
        [z(), z(), z(), one()],
    ];
    let alt_con = [
        [one(), z(), z(), z()],
        [t.clone(), -&u2, k(-1.0), z()],
        [&t * &t, 1.0 - 2.0 * &u2 * &t, -2.0 * &t, z()],
        [z(), z(), z(), one()],
    ];
    let holo = PotentialTable::from_linear(|a| {
        let q = &a[0] * &t * &t - 2.0 * &a[1] * &t + &a[2];
        [
            a[0].clone(),
            q.clone(),
            &a[0] * &t - &u2 * &q - &a[1],
            a[3].clone(),
        ]
    });
    let mut m = model(
        id,
        p,
        constants,
        chart(
            frame(xi, dual),
            Tetrad::new(cov, con, TetradSource::Repaired),
            form,
        ),
        HolonomicTable {
            table: holo,
            chart: ChartSel::Companion,
            mode: Mode::Asserted,
        },
        None,
    );
    m.companion = Some(Chart {
        name: "companion",
        frame: frame(xi_alt, dual_alt),
        tetrad: Tetrad::new(alt_cov, alt_con, TetradSource::Derived),
        metric_form: MetricForm::Full,
    });
    m.errata.push(Erratum::Tetrad {
        tetrad: Tetrad::new(printed_cov, printed_con, TetradSource::Printed),
        note: "printed covariant tetrad has u2 exp(-u3) where (u1 - u4)^2 exp(-u3) is required for duality",
    });
    m.errata.push(Erratum::Holonomic {
        chart: ChartSel::Primary,
        note: "printed holonomic table is not admissible for the frame its tetrad belongs to; it is admissible for the companion operator list (with the dropped p3 restored)",
    });
    m
}

fn viii_block() -> ([[Expr; 3]; 3], [[Expr; 3]; 3]) {
    let [u1, u2, _, _] = Expr::coords();
    let (s1, c1) = (sin(&u1), cos(&u1));
    let (s2, c2) = (sin(&u2), cos(&u2));
    let xi = [
        [z(), one(), z()],
        [c2.clone(), -&s2 * &c1 / &s1, &s2 / &s1],
        [-&s2, -&c2 * &c1 / &s1, &c2 / &s1],
    ];
    let dual = [
        [z(), c2.clone(), -&s2],
        [one(), z(), z()],
        [c1, &s2 * &s1, &c2 * &s1],
    ];
    (xi, dual)
}

fn g4_viii(id: GroupId, p: &GroupParams) -> GroupModel {
    let [u1, u2, u3, u4] = Expr::coords();
    let variant_b = id == GroupId::G4_VIII_b;
    let (xi3, dual3) = viii_block();
    let (xi, dual) = if variant_b {
        (
            embed3(xi3, [z(), z(), one(), one()]),
            embed3(
                dual3.clone(),
                [-&dual3[2][0], -&dual3[2][1], -&dual3[2][2], one()],
            ),
        )
    } else {
        (
            embed3(xi3, [z(), z(), z(), one()]),
            embed3(dual3, [z(), z(), z(), one()]),
        )
    };
    let constants =
        StructureConstants::from_entries(&[(3, 1, 2, 1.0), (1, 2, 3, 1.0), (2, 3, 1, 1.0)]);

    let t3 = if variant_b { &u3 - &u4 } else { u3.clone() };
    let (s1, c1) = (sin(&u1), cos(&u1));
    let (st, ct) = (sin(&t3), cos(&t3));
    let cov = [
        [ct.clone(), -&st, z(), z()],
        [&s1 * &st, &s1 * &ct, c1.clone(), z()],
        [z(), z(), one(), z()],
        [z(), z(), if variant_b { k(-1.0) } else { z() }, one()],
    ];
    let con = [
        [ct.clone(), &st / &s1, -&st * &c1 / &s1, z()],
        [-&st, &ct / &s1, -&ct * &c1 / &s1, z()],
        [z(), z(), one(), z()],
        [z(), z(), if variant_b { one() } else { z() }, one()],
    ];

    let mut m = if variant_b {
        let holo = PotentialTable::from_linear(|a| {
            [
                &a[0] * &ct,
                &a[2] * &c1 + &a[0] * &s1 * &st,
                a[2].clone(),
                a[3].clone(),
            ]
        });
        let mut m = model(
            id,
            p,
            constants,
            chart(
                frame(xi, dual),
                Tetrad::new(cov, con, TetradSource::Printed),
                MetricForm::Full,
            ),
            asserted(holo),
            None,
        );
        m.notes.push("printed holonomic table fixes the phase constant, so it spans only alpha1, alpha3, alpha4".into());
        m
    } else {
        // the printed amplitude/phase pair is linearised as alpha1 = a1 cos a2, alpha2 = a1 sin a2
        let holo = PotentialTable::from_linear(|a| {
            [
                &a[0] * &ct - &a[1] * &st,
                &a[2] * &c1 + &s1 * (&a[0] * &st + &a[1] * &ct),
                a[2].clone(),
                a[3].clone(),
            ]
        });
        let (s2, c2) = (sin(&u2), cos(&u2));
        let frame_table = PotentialTable::from_linear(|a| {
            let a1 = &a[2] * &c1 + &s1 * (&a[0] * &st + &a[1] * &ct);
            let a1_1 = -&a[2] * &s1 + &c1 * (&a[0] * &st + &a[1] * &ct);
            let a1_3 = &s1 * (&a[0] * &ct - &a[1] * &st);
            [
                a1,
                -&a1_1 * &s2 + &a1_3 * &c2 / &s1,
                -&a1_1 * &s2 - &a1_3 * &c2 / &s1,
                a[3].clone(),
            ]
        });
        let mut m = model(
            id,
            p,
            constants,
            chart(
                frame(xi, dual),
                Tetrad::new(cov, con, TetradSource::Printed),
                MetricForm::Block3,
            ),
            asserted(holo),
            Some(frame_table),
        );
        m.notes.push(
            "printed holonomic table is nonlinear in the phase constant; encoded linearly with alpha1 = a1 cos a2, alpha2 = a1 sin a2".into(),
        );
        m.notes.push(
            "printed frame table: the third component pairs sin u2 with A_{1,1}; the frame defining equations need -A_{1,1} cos u2 - A_{1,3} sin u2 / sin u1".into(),
        );
        m
    };
    m.domain.bounds[0] = (0.2, std::f64::consts::PI - 0.2);
    m.domain.excluded = Some("sin u1 = 0");
    m
}
