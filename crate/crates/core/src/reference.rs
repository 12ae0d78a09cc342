//! Known closed forms of low-order correlators, kept as test oracles only;
//! nothing in the solver reads them.

use crate::exact::{MPoly, RatFn};
use crate::expr::{parse, parse_poly};

/// A correlator given as `hbar` power -> coefficient.
#[derive(Clone, Debug)]
pub struct Reference {
    pub name: &'static str,
    pub n: usize,
    pub g: usize,
    pub coinciding: bool,
    pub parts: Vec<(usize, RatFn)>,
}

/// A correlator of `n` points evaluated at coinciding points.
fn one_point(name: &'static str, n: usize, g: usize, parts: &[(usize, &str)]) -> Reference {
    Reference {
        name,
        n,
        g,
        coinciding: true,
        parts: parts.iter().map(|(k, s)| (*k, parse(1, s).expect(name))).collect(),
    }
}

pub const W21_P: &str = "x1^2x2^2 + 4Tx2^2 - 4Tx1x2 - 3x1^3x2 - 32T^2 + 16Tx1^2";

const W22_A: &str = "T(5x1^5x2+5x1x2^5+4x1^4x2^2+4x1^2x2^4+3x1^3x2^3) \
    + T^2(-52x1^3x2-52x1x2^3-52x1^2x2^2+4x1^4+4x2^4) \
    + T^3(-16x1^2-16x2^2+208x1x2) + 320T^4";
const W22_P: &str = "3/2x1^4x2^2+3/2x1^2x2^4-6x1^3x2^3 \
    + T(6x1^4+6x2^4-8x1x2^3-8x1^3x2+40x1^2x2^2) \
    + T^2(-88x1^2-88x2^2+32x1x2) + 192T^3";
const W22_Q: &str = "-3x1^4x2^2+7x1^3x2^3-9/2x1^2x2^4+3/2x1x2^5 \
    + T(-4x1^4+4x1^3x2+12x1^2x2^2+8x2^4-32x1x2^3) \
    + T^2(-24x1x2+24x1^2+48x2^2) - 64T^3";
const W22_S: &str = "23/2x1^7x2^5+23/2x1^5x2^7-10x1^8x2^4-10x1^4x2^8 \
    + 3x1^9x2^3+3x1^3x2^9-6x1^6x2^6 \
    + T(-36x1^2x2^8-36x1^8x2^2+128x1^4x2^6+128x1^6x2^4-7x1^7x2^3-7x1^3x2^7 \
        + 13x1^9x2+13x1x2^9-268x1^5x2^5) \
    + T^2(-156x1^7x2-156x1x2^7+388x1^6x2^2+388x1^2x2^6+4x1^8+4x2^8 \
        + 284x1^3x2^5+284x1^5x2^3-320x1^4x2^4) \
    + T^3(-3376x1^4x2^2-3376x1^2x2^4+16x1x2^5-16x2^6-16x1^6+16x1^5x2+2912x1^3x2^3) \
    + T^4(12160x1^2x2^2+3392x1^4+3392x2^4-3712x1x2^3-3712x1^3x2) \
    + T^5(-10240x1^2-10240x2^2+2048x1x2) + 12288T^6";

pub const W31_Q111: &str = "x1^2x2^3x3^3+x1^3x2^3x3^2+x1^3x2^2x3^3 \
    + T(8x1^2x2^2x3^2+2x1^2x2^3x3+2x1x2^3x3^2+2x1^3x2x3^2+2x1^2x2x3^3 \
        + 2x1x2^2x3^3+2x1^3x2^2x3+2x1^3x3^3+2x1^3x2^3+2x2^3x3^3) \
    + T^2(-8x2^2x3^2-8x1^2x2^2-8x1^2x3^2-32x1x2^2x3-32x1x2x3^2-32x1^2x2x3 \
        - 32x1x3^3-32x1x2^3-32x1^3x3-32x2x3^3-32x2^3x3-32x1^3x2) \
    + T^3(224x1x3+224x2x3+224x1x2-64x1^2-64x2^2-64x3^2) + 640T^4";
const W31_Q110: &str = "2x1^3x2^4x3^4+2x1^4x2^3x3^4-3x1^3x2^3x3^5-x1^4x2^4x3^3 \
    + T(-18x2^3x3^6-18x1^3x3^6-6x1x3^8+48x1x2^3x3^5+24x1^4x2^3x3^2-18x1x2^4x3^4 \
        + 6x1^2x2^3x3^4-52x1^3x2^3x3^3-6x2x3^8-12x1^4x2^4x3+36x1^2x2^2x3^5-18x1^4x2x3^4 \
        + 48x1^3x2x3^5+6x1^3x2^2x3^4-48x1^2x2x3^6-48x1x2^2x3^6+6x2^4x3^5-12x1^2x2^4x3^3 \
        + 24x1^3x2^4x3^2+28x1x2x3^7-12x1^4x2^2x3^3+18x1^2x3^7+18x2^2x3^7+6x1^4x3^5) \
    + T^2(88x2x3^6+48x2^4x3^3-32x3^7+48x1^4x3^3-72x2^2x3^5-48x2^3x3^4+48x1^2x2^4x3 \
        + 48x1^4x2^2x3-48x1x2^4x3^2-48x1^4x2x3^2+48x1x2^3x3^3-144x1^2x2^2x3^3 \
        + 168x1x2^2x3^4+168x1^2x2x3^4+48x1^3x2x3^3-288x1x2x3^5 \
        - 72x1^2x3^5+88x1x3^6-48x1^3x3^4) \
    + T^3(96x1^2x3^3-96x1^3x3^2-96x1^3x2^2+96x2^2x3^3-96x1^2x2^3-96x2^3x3^2 \
        - 32x1^4x3-32x2^4x3-32x1^4x2-32x1x2^4+64x1^3x2x3+64x1x2^3x3 \
        - 256x1x2x3^3+224x2x3^4+224x1x3^4) \
    + T^4(384x1x2^2-384x2^2x3+384x2x3^2+384x1x3^2+384x1^2x2-384x1^2x3 \
        - 1024x3^3+256x1^3+256x2^3-256x1x2x3) \
    + T^5(2048x3-1024x1-1024x2)";

const W40_NUM: &str = "-12288T^6 \
    + T^5(1536perm(x1^2)-4096perm(x1x2)) \
    + T^4(-1536x1x2x3x4+640perm(x1x2x3^2)+640perm(x1^3x2)) \
    + T^3(288perm(x1x2x3x4^3)-64perm(x1x2^2x3^3)-64perm(x1^3x2^3)-64perm(x1x2x3^2x4^2) \
        - 96perm(x1^2x2^2x3^2)) \
    + T^2(48x1^2x2^2x3^2x4^2-48perm(x1^3x2^3x3x4)-8perm(x1^3x2^3x3^2)-8perm(x1^3x2^2x3^2x4)) \
    + T(8perm(x1^3x2^3x3^2x4^2)+6perm(x1^3x2^3x3^3x4))";

fn poly(n: usize, s: &str) -> MPoly {
    parse_poly(n, s).expect("reference polynomial")
}

fn over(p: MPoly, ys: &[u32], diffs: &[(usize, usize, u32)]) -> RatFn {
    let mut f = RatFn::from_mpoly(p);
    for (k, a) in ys.iter().enumerate() {
        f = f.div_y(k + 1, *a);
    }
    for &(i, j, b) in diffs {
        f = f.div_diff(i, j, b);
    }
    f
}

pub fn w1_1() -> Reference {
    one_point("W_1^(1)", 1, 1, &[(1, "1/2(1/y - x/y^2)")])
}

pub fn w1_2() -> Reference {
    one_point("W_1^(2)", 1, 2, &[(2, "-x/y^4 + (x^2+T)/y^5"), (0, "T/y^5")])
}

pub fn w1_3() -> Reference {
    one_point(
        "W_1^(3)",
        1,
        3,
        &[
            (3, "5((x^2+T)/y^7 - x(x^2+2T)/y^8)"),
            (1, "(x^2+6T)/(2y^7) - x(x^2+30T)/(2y^8)"),
        ],
    )
}

pub fn w1_4() -> Reference {
    one_point(
        "W_1^(4)",
        1,
        4,
        &[
            (4, "-(37x^3+92Tx)/y^10 + (37x^4+123Tx^2+21T^2)/y^11"),
            (2, "-(23x^3+180Tx)/(2y^10) + (23x^4+454Tx^2+176T^2)/(2y^11)"),
            (0, "21T(x^2+T)/y^11"),
        ],
    )
}

pub fn w2_0() -> Reference {
    Reference {
        name: "W_2^(0)",
        n: 2,
        g: 0,
        coinciding: false,
        parts: vec![(0, parse(2, "-(y1y2 - x1x2 + 4T)/(2(x1-x2)^2y1y2)").unwrap())],
    }
}

/// An equivalent closed form of `W_2^(0)`.
pub fn w2_0_alt() -> Reference {
    Reference {
        name: "W_2^(0) (split form)",
        parts: vec![(0, parse(2, "-1/(2(x1-x2)^2) + (x1x2-4T)/(2(x1-x2)^2y1y2)").unwrap())],
        ..w2_0()
    }
}

pub fn w2_0_xx() -> Reference {
    one_point("W_2^(0)(x,x)", 2, 0, &[(0, "T/y^4")])
}

pub fn w3_0() -> Reference {
    Reference {
        name: "W_3^(0)",
        n: 3,
        g: 0,
        coinciding: false,
        parts: vec![(0, parse(3, "2T(x1x2+x1x3+x2x3+4T)/(y1^3y2^3y3^3)").unwrap())],
    }
}

pub fn w3_0_xxx() -> Reference {
    one_point("W_3^(0)(x,x,x)", 3, 0, &[(0, "2T(3x^2+4T)/y^9")])
}

pub fn w4_0() -> Reference {
    Reference {
        name: "W_4^(0)",
        n: 4,
        g: 0,
        coinciding: false,
        parts: vec![(0, over(poly(4, W40_NUM), &[5, 5, 5, 5], &[]))],
    }
}

pub fn w4_0_xxxx() -> Reference {
    one_point("W_4^(0)(x,x,x,x)", 4, 0, &[(0, "24T(3x^4+18Tx^2+8T^2)/y^14")])
}

pub fn w2_1() -> Reference {
    let f = parse(
        2,
        "1/2((x1x2+4T)/(y1^3y2^3) \
         - (x1^2x2^2+4Tx1^2-4Tx1x2-3x1x2^3-32T^2+16Tx2^2)/((x1-x2)^3y1y2^4) \
         + (x1^2x2^2+4Tx2^2-4Tx1x2-3x1^3x2-32T^2+16Tx1^2)/((x1-x2)^3y1^4y2))",
    )
    .unwrap();
    Reference { name: "W_2^(1)", n: 2, g: 1, coinciding: false, parts: vec![(1, f)] }
}

pub fn w2_1_xx() -> Reference {
    one_point("W_2^(1)(x,x)", 2, 1, &[(1, "-x(x^2+18T)/(2y^7) + (x^2+4T)/(2y^6)")])
}

pub fn w2_2() -> Reference {
    let a = over(poly(2, W22_A), &[7, 7], &[]);
    let p = over(poly(2, W22_P), &[4, 4], &[(1, 2, 4)]);
    let q = poly(2, W22_Q);
    let q12 = over(q.clone(), &[3, 6], &[(1, 2, 3)]);
    let q21 = over(q.remap(2, &[2, 1]), &[6, 3], &[(1, 2, 3)]);
    let s = over(poly(2, W22_S), &[7, 7], &[(1, 2, 4)]);
    Reference {
        name: "W_2^(2)",
        n: 2,
        g: 2,
        coinciding: false,
        parts: vec![(0, a), (2, p.add(&q12).sub(&q21).add(&s))],
    }
}

pub fn w2_2_xx() -> Reference {
    one_point(
        "W_2^(2)(x,x)",
        2,
        2,
        &[(0, "T(20T+21x^2)/y^10"), (2, "(98Tx^2+38T^2+8x^4)/y^10 - (8x^3+45Tx)/y^9")],
    )
}

pub fn w3_1() -> Reference {
    let q111 = over(poly(3, W31_Q111), &[5, 5, 5], &[]);
    let q110p = poly(3, W31_Q110);
    let q110 = over(q110p.clone(), &[3, 3, 6], &[(1, 3, 3), (2, 3, 3)]);
    // Q101(x1,x2,x3) = -Q110(x1,x3,x2), Q011(x1,x2,x3) = Q110(x3,x2,x1)
    let q101 = over(q110p.remap(3, &[1, 3, 2]).neg(), &[3, 6, 3], &[(1, 2, 3), (2, 3, 3)]);
    let q011 = over(q110p.remap(3, &[3, 2, 1]), &[6, 3, 3], &[(1, 2, 3), (1, 3, 3)]);
    Reference {
        name: "W_3^(1)",
        n: 3,
        g: 1,
        coinciding: false,
        parts: vec![(1, q111.add(&q110).add(&q101).add(&q011))],
    }
}

pub fn w3_1_xxx() -> Reference {
    one_point(
        "W_3^(1)(x,x,x)",
        3,
        1,
        &[(1, "(3x^4+50Tx^2+40T^2)/y^11 - x(3x^4+160Tx^2+354T^2)/y^12")],
    )
}

/// Every reference correlator, multivariate ones first.
pub fn all() -> Vec<Reference> {
    vec![
        w2_0(),
        w2_0_alt(),
        w3_0(),
        w4_0(),
        w2_1(),
        w2_2(),
        w3_1(),
        w1_1(),
        w1_2(),
        w1_3(),
        w1_4(),
        w2_0_xx(),
        w3_0_xxx(),
        w4_0_xxxx(),
        w2_1_xx(),
        w2_2_xx(),
        w3_1_xxx(),
    ]
}

pub fn w31_q111() -> MPoly {
    poly(3, W31_Q111)
}

pub fn w21_p() -> MPoly {
    poly(2, W21_P)
}
