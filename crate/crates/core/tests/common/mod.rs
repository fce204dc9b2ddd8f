//! Exact rational oracle shared by integration targets.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn fact(n: i32) -> BigInt {
    assert!(n >= 0);
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Exact coefficient from integers given as twice the physical values.
pub fn racah_exact(tj1: i32, tm1: i32, tj2: i32, tm2: i32, tj: i32, tm: i32) -> f64 {
    if tm1 + tm2 != tm || tj > tj1 + tj2 || tj < (tj1 - tj2).abs() || (tj1 + tj2 + tj) % 2 != 0 {
        return 0.0;
    }
    let h = |x: i32| {
        assert_eq!(x % 2, 0);
        x / 2
    };
    let pre = BigRational::new(
        BigInt::from(tj + 1) * fact(h(tj1 + tj2 - tj)) * fact(h(tj1 - tj2 + tj)) * fact(h(-tj1 + tj2 + tj)),
        fact(h(tj1 + tj2 + tj) + 1),
    ) * BigRational::from_integer(
        fact(h(tj + tm)) * fact(h(tj - tm)) * fact(h(tj1 - tm1)) * fact(h(tj1 + tm1)) * fact(h(tj2 - tm2)) * fact(h(tj2 + tm2)),
    );
    let mut sum = BigRational::zero();
    for k in 0..=h(tj1 + tj2 - tj) {
        let args = [
            k,
            h(tj1 + tj2 - tj) - k,
            h(tj1 - tm1) - k,
            h(tj2 + tm2) - k,
            h(tj - tj2 + tm1) + k,
            h(tj - tj1 - tm2) + k,
        ];
        if args.iter().any(|&a| a < 0) {
            continue;
        }
        let den = args.iter().fold(BigInt::one(), |acc, &a| acc * fact(a));
        let term = BigRational::new(BigInt::one(), den);
        sum = if k % 2 == 0 { sum + term } else { sum - term };
    }
    let square = (pre * &sum * &sum).to_f64().unwrap();
    let magnitude = square.sqrt();
    if sum.is_negative() {
        -magnitude
    } else {
        magnitude
    }
}
