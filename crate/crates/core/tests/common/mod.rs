use rand::Rng;
use scalevar_core::lagdsl::{Expr, Func, Var};

/// Random expression over `t, q1, q2, v1, v2` that stays smooth for real
/// arguments: `ln`, `sqrt` and divisions only see operands of the form
/// `c + x²` with `c ≥ 1`.
pub fn random_expr<R: Rng>(rng: &mut R, depth: u32) -> Expr {
    let leaf = depth == 0 || rng.gen_bool(0.25);
    if leaf {
        return match rng.gen_range(0..6) {
            0 => Expr::real((rng.gen_range(-30..=30) as f64) / 10.0),
            1 => Expr::var(Var::T),
            2 => Expr::var(Var::Q(0)),
            3 => Expr::var(Var::Q(1)),
            4 => Expr::var(Var::V(0)),
            _ => Expr::var(Var::V(1)),
        };
    }
    let a = random_expr(rng, depth - 1);
    match rng.gen_range(0..10) {
        0 | 1 => a + random_expr(rng, depth - 1),
        2 => a - random_expr(rng, depth - 1),
        3 | 4 => a * random_expr(rng, depth - 1),
        5 => a / (Expr::real(1.5) + random_expr(rng, depth - 1).powf(2.0)),
        6 => a.powf([2.0, 3.0][rng.gen_range(0..2)]),
        7 => Expr::call([Func::Sin, Func::Cos][rng.gen_range(0..2)], a),
        8 => Expr::call(Func::Exp, Expr::real(0.3) * a),
        _ => Expr::call([Func::Ln, Func::Sqrt][rng.gen_range(0..2)], Expr::real(1.0) + a.powf(2.0)),
    }
}
