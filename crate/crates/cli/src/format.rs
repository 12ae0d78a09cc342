//! Text, LaTeX and machine renderings of correlators.

use gbe_core::exact::{mono, MPoly, Rat, RatFn, YPoly};
use gbe_core::solver::CorrFn;
use serde_json::json;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Latex,
    Machine,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Style {
    Text,
    Latex,
}

impl Style {
    fn var(self, v: usize, npoints: usize) -> String {
        match (self, v) {
            (_, 0) => "T".into(),
            (_, _) if npoints == 1 => "x".into(),
            (Style::Text, i) => format!("x{i}"),
            (Style::Latex, i) => format!("x_{{{i}}}"),
        }
    }

    fn y(self, i: usize, npoints: usize) -> String {
        match self {
            _ if npoints == 1 => "y".into(),
            Style::Text => format!("y{i}"),
            Style::Latex => format!("y_{{{i}}}"),
        }
    }

    fn pow(self, base: &str, e: u32) -> String {
        match (self, e) {
            (_, 1) => base.into(),
            (Style::Text, e) => format!("{base}^{e}"),
            (Style::Latex, e) => format!("{base}^{{{e}}}"),
        }
    }
}

fn rat_text(r: &Rat) -> String {
    r.abs().to_string()
}

/// Terms of `p`, highest first, as `(negative, body)`.
fn terms(p: &MPoly, style: Style) -> Vec<(bool, String)> {
    let n = p.npoints();
    p.terms()
        .iter()
        .map(|(m, c)| {
            let vars: String = (0..=n)
                .filter_map(|v| {
                    let e = mono::exp(*m, v);
                    (e > 0).then(|| style.pow(&style.var(v, n), e))
                })
                .collect();
            let coef = c.abs();
            let body = if vars.is_empty() {
                rat_text(&coef)
            } else if coef.is_one() {
                vars
            } else {
                format!("{}{}", rat_text(&coef), vars)
            };
            (c.is_negative(), body)
        })
        .collect()
}

fn join(ts: &[(bool, String)]) -> String {
    let mut s = String::new();
    for (k, (neg, body)) in ts.iter().enumerate() {
        match (k, neg) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push_str(" - "),
            (_, false) => s.push_str(" + "),
        }
        s.push_str(body);
    }
    s
}

/// `sign * num / den` with `num` an integer polynomial.
struct Frac {
    negative: bool,
    num: String,
    num_terms: usize,
    den: Vec<String>,
    den_scalar: Rat,
}

impl Frac {
    fn render(&self, style: Style) -> String {
        let den_parts: Vec<String> = if self.den_scalar.is_one() {
            self.den.clone()
        } else {
            std::iter::once(self.den_scalar.to_string()).chain(self.den.iter().cloned()).collect()
        };
        match style {
            Style::Latex => {
                if den_parts.is_empty() {
                    self.num.clone()
                } else {
                    format!("\\frac{{{}}}{{{}}}", self.num, den_parts.join(" "))
                }
            }
            Style::Text => {
                let num = if self.num_terms > 1 && !den_parts.is_empty() {
                    format!("({})", self.num)
                } else {
                    self.num.clone()
                };
                match den_parts.len() {
                    0 => num,
                    1 => format!("{num}/{}", den_parts[0]),
                    _ => format!("{num}/({})", den_parts.concat()),
                }
            }
        }
    }
}

/// Content-free numerator for `q * p`: integer coefficients, leading one positive.
fn split_content(p: &MPoly) -> (bool, MPoly, Rat) {
    let c = p.content();
    let prim = p.scale(&c.recip());
    let neg = prim.leading_coeff().is_negative();
    let prim = if neg { prim.neg() } else { prim };
    (neg, prim, c)
}

/// One-point function as a sum of slots `P_k / y^k`, lowest `k` first.
fn one_point(f: &RatFn, style: Style) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let den = f.den();
    let a = den.yexp(1) as i64;
    let (pa, pb) = f.num().split(1);
    let get = |p: &YPoly| p.part(0).cloned().unwrap_or_else(|| MPoly::zero(1));
    let mut slots = vec![(a - 1, get(&pb)), (a, get(&pa))];
    slots.retain(|(_, p)| !p.is_zero());
    let scalar = den.scalar().clone();
    let mut out: Vec<(bool, String)> = Vec::new();
    for (k, p) in slots {
        let (neg, prim, c) = split_content(&p.scale(&scalar.recip()));
        let num_terms = prim.terms().len();
        let numer = prim.scale(&Rat::from_bigint(c.numer()));
        let body = join(&terms(&numer, style));
        let mut den = Vec::new();
        let y = style.y(1, 1);
        if k > 0 {
            den.push(style.pow(&y, k as u32));
        }
        let body = if k < 0 {
            // only W_1^(0) has a bare y
            if num_terms > 1 { format!("({body}){y}") } else if body == "1" { y } else { format!("{body}{y}") }
        } else {
            body
        };
        let fr = Frac { negative: neg, num: body, num_terms, den, den_scalar: Rat::from_bigint(c.denom()) };
        out.push((fr.negative, fr.render(style)));
    }
    join(&out)
}

fn multi_point(f: &RatFn, style: Style) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let n = f.npoints();
    let den = f.den();
    let content = f.num().content();
    let mut parts: Vec<(bool, String)> = Vec::new();
    for (mask, p) in f.num().parts() {
        let ys: String = (1..=n).filter(|i| mask & (1 << (i - 1)) != 0).map(|i| style.y(i, n)).collect();
        let q = p.scale(&content.recip());
        let ts = terms(&q, style);
        let body = if ys.is_empty() {
            join(&ts)
        } else if ts.len() == 1 {
            let (neg, b) = &ts[0];
            let b = if b == "1" { ys.clone() } else { format!("{b}{ys}") };
            join(&[(*neg, b)])
        } else {
            match style {
                Style::Text => format!("{ys}({})", join(&ts)),
                Style::Latex => format!("{ys}\\left({}\\right)", join(&ts)),
            }
        };
        parts.push((false, body));
    }
    let num = parts.iter().map(|(_, b)| b.clone()).collect::<Vec<_>>();
    let mut num = num.join(" + ").replace("+ -", "- ");
    let scalar = &content / den.scalar();
    let negative = scalar.is_negative();
    let numer = Rat::from_bigint(scalar.abs().numer());
    let mut num_terms = f.num().term_count();
    if !numer.is_one() {
        num_terms = 1;
        num = match style {
            Style::Text => format!("{numer}({num})"),
            Style::Latex => format!("{numer}\\left({num}\\right)"),
        };
    }
    let mut dens: Vec<String> = Vec::new();
    for i in 1..=n {
        let e = den.yexp(i);
        if e > 0 {
            dens.push(style.pow(&style.y(i, n), e));
        }
    }
    for ((i, j), b) in den.diffs() {
        let d = format!("({} - {})", style.var(*i, n), style.var(*j, n));
        dens.push(style.pow(&d, *b));
    }
    let fr = Frac {
        negative,
        num,
        num_terms,
        den: dens,
        den_scalar: Rat::from_bigint(scalar.abs().denom()),
    };
    let s = fr.render(style);
    if negative { format!("-{s}") } else { s }
}

pub fn ratfn(f: &RatFn, latex: bool) -> String {
    let style = if latex { Style::Latex } else { Style::Text };
    if f.npoints() == 1 && !f.den().has_diffs() {
        one_point(f, style)
    } else {
        multi_point(f, style)
    }
}

fn hbar(style: Style, k: usize) -> String {
    let h = if style == Style::Latex { "\\hbar" } else { "h" };
    style.pow(h, k as u32)
}

pub fn corrfn(w: &CorrFn, latex: bool) -> String {
    let style = if latex { Style::Latex } else { Style::Text };
    let nonzero: Vec<(usize, &RatFn)> =
        w.parts.iter().enumerate().filter(|(_, p)| !p.is_zero()).map(|(r, p)| (w.hbar_power(r), p)).collect();
    if nonzero.is_empty() {
        return "0".into();
    }
    let single = nonzero.len() == 1;
    let pieces: Vec<String> = nonzero
        .iter()
        .map(|(k, p)| {
            let body = ratfn(p, latex);
            if *k == 0 && single {
                return body;
            }
            let wrapped = match style {
                Style::Text => format!("({body})"),
                Style::Latex => format!("\\left({body}\\right)"),
            };
            if *k == 0 { wrapped } else { format!("{}{wrapped}", hbar(style, *k)) }
        })
        .collect();
    pieces.join(" + ")
}

pub fn machine(w: &CorrFn, n: usize, coinciding: bool) -> serde_json::Value {
    let parts: Vec<_> = w
        .parts
        .iter()
        .enumerate()
        .map(|(r, p)| json!({ "hbar_power": w.hbar_power(r), "ratfn": p.to_canonical() }))
        .collect();
    json!({ "n": n, "g": w.g, "coinciding": coinciding, "hbar": "h", "parts": parts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use gbe_core::expr::parse;

    fn one(s: &str) -> String {
        ratfn(&parse(1, s).unwrap(), false)
    }

    #[test]
    fn one_point_layout() {
        assert_eq!(one("T/y^4"), "T/y^4");
        assert_eq!(one("1/(2y) - x/(2y^2)"), "1/(2y) - x/(2y^2)");
        assert_eq!(one("5(x^2 + T)/y^7 - 5x(x^2 + 2T)/y^8"), "(5x^2 + 5T)/y^7 - (5x^3 + 10Tx)/y^8");
        assert_eq!(one("(x - y)/2"), "-y/2 + x/2");
    }

    #[test]
    fn latex_layout() {
        let f = parse(1, "1/(2y) - x/(2y^2)").unwrap();
        assert_eq!(ratfn(&f, true), "\\frac{1}{2 y} - \\frac{x}{2 y^{2}}");
    }

    #[test]
    fn multi_point_layout() {
        let f = parse(2, "T/(y1 y2 (x1 - x2)^2)").unwrap();
        assert_eq!(ratfn(&f, false), "T/(y1y2(x1 - x2)^2)");
    }
}
