//! The Airy function Ai and Ai' on the complex plane, accurate to >= 10
//! significant digits for |z| <= 30, plus real negative zeros of Ai.
//!
//! Evaluation strategy:
//!
//! * `|arg z| <= 2pi/3` ("direct" sector):
//!   - `|z| < 9.5`: Maclaurin series summed in double-double arithmetic.
//!     The series for Ai is a difference of two exponentially growing sums
//!     (cancellation up to ~e^{2*(2/3)*9.5^{3/2}} ~ 1e17), which plain f64
//!     cannot survive; double-double keeps ~15 digits at the worst radius.
//!   - `|z| >= 9.5`: Poincare expansion in zeta = (2/3) z^{3/2}, truncated
//!     at the smallest term (floor ~ e^{-2|zeta|} <= 1e-16 here).
//! * `|arg z| > 2pi/3`: the connection identity
//!   `Ai(z) = -[w Ai(w z) + w~ Ai(w~ z)]`, `w = e^{2pi i/3}`, applied once;
//!   both rotated arguments land in the direct sector and the two terms do
//!   not cancel (one dominates except on the negative axis, where both are
//!   O(|z|^{-1/4})).

use crate::dd::{CDd, Dd};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::LazyLock;

// double-double splits of Ai(0) and Ai'(0)
const AI0: Dd = Dd { hi: 0.355_028_053_887_817_2, lo: 2.052_336_324_362_12e-17 };
const AIP0: Dd = Dd { hi: -0.258_819_403_792_806_8, lo: 2.522_243_111_610_832e-17 };

const SERIES_RADIUS: f64 = 9.5;
const MAX_TERMS: usize = 96;

// c_k, d_k: Maclaurin coefficients of the two ODE solutions
//   f = sum c_k z^{3k}            c_0 = 1, c_{k+1} = c_k / ((3k+2)(3k+3))
//   g = z sum d_k z^{3k}          d_0 = 1, d_{k+1} = d_k / ((3k+3)(3k+4))
// plus shifted arrays for the derivatives.
struct SeriesCoefs {
    c: Vec<Dd>,
    d: Vec<Dd>,
    /// 3(k+1) c_{k+1}: coefficients of f'(z)/z^2 as a series in z^3
    cp: Vec<Dd>,
    /// (3k+1) d_k: coefficients of g'(z) as a series in z^3
    dp: Vec<Dd>,
}

static COEFS: LazyLock<SeriesCoefs> = LazyLock::new(|| {
    let mut c = Vec::with_capacity(MAX_TERMS + 1);
    let mut d = Vec::with_capacity(MAX_TERMS + 1);
    let mut ck = Dd::ONE;
    let mut dk = Dd::ONE;
    for k in 0..=MAX_TERMS {
        c.push(ck);
        d.push(dk);
        let kf = k as f64;
        ck = ck.div_f64((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        dk = dk.div_f64((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
    }
    let cp = (0..MAX_TERMS)
        .map(|k| c[k + 1].mul_f64(3.0 * (k as f64 + 1.0)))
        .collect();
    let dp = (0..MAX_TERMS)
        .map(|k| d[k].mul_f64(3.0 * k as f64 + 1.0))
        .collect();
    SeriesCoefs { c, d, cp, dp }
});

fn maclaurin_pair(z: Complex64) -> (Complex64, Complex64) {
    let co = &*COEFS;
    let zd = CDd::from_c64(z);
    let w = zd.mul(zd).mul(zd);
    let wmag = z.norm().powi(3);

    let mut wk = CDd { re: Dd::ONE, im: Dd::ZERO };
    let mut f = CDd::ZERO;
    let mut fp = CDd::ZERO;
    let mut g = CDd::ZERO;
    let mut gp = CDd::ZERO;
    let mut tmag = 1.0_f64;
    let mut summag = 0.0_f64;
    for k in 0..MAX_TERMS {
        f = f.add(wk.scale(co.c[k]));
        fp = fp.add(wk.scale(co.cp[k]));
        g = g.add(wk.scale(co.d[k]));
        gp = gp.add(wk.scale(co.dp[k]));
        summag += tmag;
        if tmag < 1e-36 * summag {
            break;
        }
        wk = wk.mul(w);
        tmag *= wmag / ((3.0 * k as f64 + 2.0) * (3.0 * k as f64 + 3.0));
    }
    let z2 = zd.mul(zd);
    let ai = f.scale(AI0).add(zd.mul(g).scale(AIP0));
    let aip = z2.mul(fp).scale(AI0).add(gp.scale(AIP0));
    (ai.to_c64(), aip.to_c64())
}

// Poincare expansion coefficients u_k and the Ai' companions v_k
static UV: LazyLock<(Vec<f64>, Vec<f64>)> = LazyLock::new(|| {
    let n = 48;
    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    let mut uk = 1.0_f64;
    for k in 0..n {
        u.push(uk);
        let kf = k as f64;
        v.push(uk * (6.0 * kf + 1.0) / (1.0 - 6.0 * kf));
        uk *= (6.0 * kf + 5.0) * (6.0 * kf + 1.0) / (72.0 * (kf + 1.0));
    }
    (u, v)
});

/// Poincare coefficient tables `(u_k, v_k)`, shared with the contour-integral
/// machinery that needs Airy factors in log scale.
pub(crate) fn poincare_uv() -> (&'static [f64], &'static [f64]) {
    let (u, v) = &*UV;
    (u, v)
}

fn asymptotic_pair(z: Complex64) -> (Complex64, Complex64) {
    let (u, v) = &*UV;
    let s = z.sqrt(); // principal branch; |arg s| <= pi/3 here
    let zeta = (2.0 / 3.0) * z * s;
    let minv = -zeta.inv();
    let mut p = Complex64::new(1.0, 0.0);
    let mut su = Complex64::new(1.0, 0.0);
    let mut sv = Complex64::new(1.0, 0.0);
    let mut prev = f64::MAX;
    for k in 1..u.len() {
        p *= minv;
        let mag = u[k] * p.norm();
        if mag >= prev || mag < 1e-19 {
            break;
        }
        prev = mag;
        su += u[k] * p;
        sv += v[k] * p;
    }
    let pref = 0.5 / PI.sqrt() * (-zeta).exp();
    let z4 = s.sqrt(); // z^{1/4}
    (pref / z4 * su, -pref * z4 * sv)
}

fn direct_pair(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() < SERIES_RADIUS {
        maclaurin_pair(z)
    } else {
        asymptotic_pair(z)
    }
}

/// Ai(z) and Ai'(z) in one evaluation.
pub fn airy_ai_pair(z: Complex64) -> (Complex64, Complex64) {
    if z.arg().abs() <= 2.0 * PI / 3.0 + 1e-14 {
        direct_pair(z)
    } else {
        let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        let wb = w.conj();
        let (a1, ap1) = direct_pair(w * z);
        let (a2, ap2) = direct_pair(wb * z);
        // d/dz of -w Ai(w z) is -w^2 Ai'(w z) and w^2 = conj(w)
        (-(w * a1 + wb * a2), -(wb * ap1 + w * ap2))
    }
}

/// Ai(z).
pub fn airy_ai(z: Complex64) -> Complex64 {
    airy_ai_pair(z).0
}

/// Ai'(z).
pub fn airy_aip(z: Complex64) -> Complex64 {
    airy_ai_pair(z).1
}

/// n-th real zero of Ai (n >= 1), a negative number, |Ai| at the result
/// is at machine-noise level (<= 1e-12 guaranteed well past n = 64).
pub fn airy_zero(n: usize) -> f64 {
    assert!(n >= 1, "zeros are indexed from 1");
    let t = 3.0 * PI * (4.0 * n as f64 - 1.0) / 8.0;
    let t2 = t.powi(-2);
    let mut x = -t.powf(2.0 / 3.0)
        * (1.0 + t2 * (5.0 / 48.0 + t2 * (-5.0 / 36.0 + t2 * (77125.0 / 82944.0))));
    for _ in 0..40 {
        let (a, ap) = airy_ai_pair(Complex64::new(x, 0.0));
        let dx = a.re / ap.re;
        x -= dx;
        if dx.abs() <= 1e-13 * x.abs() {
            break;
        }
    }
    x
}

/// First `n_max` zeros of Ai, in order (all negative, decreasing).
pub fn airy_zeros(n_max: usize) -> Vec<f64> {
    (1..=n_max).map(airy_zero).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rel_err;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// 21-digit reference values across every evaluation regime.
    #[rustfmt::skip]
    const TABLE: &[(f64, f64, f64, f64, f64, f64)] = &[
        // z.re, z.im, Ai.re, Ai.im, Aip.re, Aip.im
        (0.0, 0.0, 0.35502805388781723926, 0.0, -0.258819403792806798405, 0.0),
        (0.5, 0.0, 0.231693606480833489769, 0.0, -0.224910532664683893136, 0.0),
        (1.0, 0.0, 0.135292416312881415524, 0.0, -0.159147441296793212788, 0.0),
        (2.0, 0.0, 0.0349241304232743791353, 0.0, -0.053090384433653631704, 0.0),
        (0.0, 1.0, 0.331493305432141188985, -0.317449858968443773478, -0.432492659841807099306, 0.0980478562292432323838),
        (1.0, 1.0, 0.0604583083718381491965, -0.151889565877181402355, -0.130627953499647517709, 0.163067596449323915744),
        (2.0, 2.0, -0.0639592282742582745812, -0.00212067870262241839756, 0.102231259563879285889, 0.0412258400343277466108),
        (-1.0, 0.0, 0.5355608832923521188, 0.0, -0.010160567116645209395, 0.0),
        (-2.0, 0.0, 0.227407428201685575992, 0.0, 0.618259020741691041406, 0.0),
        (-5.0, 0.0, 0.350761009024114319788, 0.0, 0.327192818554443136795, 0.0),
        (1.5, 2.59807621135331594029, -0.180565500293220136021, 0.114458994227023743115, 0.371194183267799363665, -0.0326840377913968103673),
        (-2.0, 3.46410161513775458705, 36.3070848272934420604, -20.9613558128828018236, -70.1168003930164621316, -40.4808227597434658055),
        (-4.33012701892219323382, 2.5, -3.82315492730386024807, -36.7334588238207899215, -76.4308946184329134337, 27.7298393146229693214),
        (-6.0, 0.0, -0.329145173629823105231, 0.0, 0.34593548728134289493, 0.0),
        (-6.0, 0.5, -0.606325159384953088903, 0.22865098324913456624, 0.703539308383240275282, 1.23515200740126762858),
        (4.94974746830583267081, 4.94974746830583267081, 0.000870197792320266598403, 0.00126452308395252436049, -0.000899597307244579319913, -0.00398339204683826227626),
        (8.0, 0.0, 4.69220761609923162565e-8, 0.0, -1.34143929790678657429e-7, 0.0),
        (-8.0, 0.0, -0.0527050503563862026221, 0.0, 0.935560938198306551026, 0.0),
        (0.0, 9.0, 46882.8470215125927525, -28835.2192529404312507, -159831.34852792852477, -36947.0995489596912402),
        (-7.07106781186547524401, 7.07106781186547524401, 16833793.2864445629023, 42556639.0122814422673, 103505866.002411553763, -99607417.7254546897884),
        (12.0, 0.0, 1.39318468887536083905e-13, 0.0, -4.85473655498530846299e-13, 0.0),
        (-12.0, 0.0, -0.0665551750543731294742, 0.0, 1.0231104533679707299, 0.0),
        (12.9903810567665797015, 7.5, -1.32743845384817080613e-13, -1.2580110115760869484e-13, 3.73430011568005506446e-13, 6.0441237834539831135e-13),
        (-10.0, 17.3205080756887729353, 9.109569882958433995e24, -5.25941262412775953624e24, -4.06245559965807314521e25, -2.34545983403349108728e25),
        (-20.0, 0.0, -0.17640612707798468959, 0.0, 0.892862856736471238398, 0.0),
        (0.0, 25.0, -4.58505024900121070812e24, -1.79205046256843237924e24, 9.89289418570811496759e24, 2.25005076636749722771e25),
        (30.0, 0.0, 3.20821759155049557108e-49, 0.0, -1.75987658143272598208e-48, 0.0),
        (-30.0, 0.0, -0.0879681884568421628326, 0.0, 1.2286206026374851347, 0.0),
        (6.0, 0.0, 9.94769436025288957024e-6, 0.0, -2.47652003970349547542e-5, 0.0),
        (3.0, 5.19615242270663188058, -0.145808553852776192827, 0.10584944678059410159, 0.438479371123583358397, -0.0534302362481709898695),
        (4.5, 0.0, 0.000330250323514308983659, 0.0, -0.000717866567557508888694, 0.0),
        (9.2, 0.0, 1.34446218337071327597e-9, 0.0, -4.11371244280792006026e-9, 0.0),
        (7.59308765716904033462, 5.19471075523432528625, -8.44675508661964828552e-7, -1.28228343292696904902e-6, 1.33602888702986893405e-6, 4.48898604078878871158e-6),
        (-2.28880760100928312849, 5.00113584754124932468, -130.372602739373468005, -915.817518154501618306, -1604.57600672154071145, 1394.1007198385346238),
        (-3.95733383080836424086, 1.40695023065480066208, -1.35978272944791899937, -3.00091274535561492808, -5.66192951153699352292, 3.57248399815991925858),
        (-9.39187041256882696623, 0.39085822687293144443, 0.52343559257067872699, -0.211169476876571368698, -0.796924638294807734499, -1.32820656147592925669),
        (0.01, -0.02, 0.352439210475134185014, 0.00517650124206733238344, -0.258871708948309491124, -7.11781119183794047874e-5),
        (3.9, -0.3, 0.000967103267241799561004, 0.000676615102016200088459, -0.00201729755656919950447, -0.00130798981100662352014),
        (-4.1, 1.3, -0.293384049430934640533, -2.73715703341331990297, -5.55261719028970658948, 1.30096973194262921562),
        (25.0, -10.0, 1.11421017303715253498e-35, 1.71970498848033912843e-36, -5.85506834060818832544e-35, 2.118144891019151804e-36),
    ];

    #[test]
    fn value_table_10_digits() {
        for &(zr, zi, ar, ai_, pr, pi_) in TABLE {
            let z = c(zr, zi);
            let (a, ap) = airy_ai_pair(z);
            let ea = rel_err(a, c(ar, ai_), 1e-300);
            let ep = rel_err(ap, c(pr, pi_), 1e-300);
            assert!(ea < 1e-10, "Ai at z={z}: rel err {ea:.2e}");
            assert!(ep < 1e-10, "Ai' at z={z}: rel err {ep:.2e}");
        }
    }

    #[test]
    fn rotation_identity_consistency() {
        // Ai(z) + w Ai(w z) + w~ Ai(w~ z) = 0 for any z; exercise points whose
        // rotations cross every internal dispatch boundary
        let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        for &r in &[0.7, 3.0, 6.0, 9.3, 9.7, 14.0] {
            for &th in &[0.0, 0.4, 1.0, 1.9, -0.9, -2.3, 3.0] {
                let z = Complex64::from_polar(r, th);
                let s = airy_ai(z) + w * airy_ai(w * z) + w.conj() * airy_ai(w.conj() * z);
                let scale = airy_ai(z)
                    .norm()
                    .max((w * airy_ai(w * z)).norm())
                    .max(1e-300);
                assert!(
                    s.norm() / scale < 1e-11,
                    "rotation identity at r={r} th={th}: {:.2e}",
                    s.norm() / scale
                );
            }
        }
    }

    #[test]
    fn conjugation_symmetry() {
        for &(zr, zi) in &[(1.0, 2.0), (-3.0, 0.5), (-7.0, 4.0), (11.0, -3.0)] {
            let z = c(zr, zi);
            let a = airy_ai(z.conj());
            let b = airy_ai(z).conj();
            assert!(rel_err(a, b, 1e-300) < 1e-14);
        }
    }

    #[test]
    fn zeros_match_reference_and_residuals_small() {
        let reference = [
            -2.33810741045976703849,
            -4.08794944413097061664,
            -5.52055982809555105913,
            -6.78670809007175899878,
            -7.94413358712085312314,
            -9.02265085334098038016,
            -10.0401743415580859306,
            -11.0085243037332628932,
            -11.936015563236262517,
            -12.8287767528657572004,
            -13.6914890352107179283,
            -14.5278299517753349821,
        ];
        let zs = airy_zeros(12);
        for (i, (&got, &want)) in zs.iter().zip(&reference).enumerate() {
            assert!(
                (got - want).abs() < 1e-12 * want.abs(),
                "zero n={} got {got} want {want}",
                i + 1
            );
        }
        for n in [1, 8, 20, 40, 64] {
            let x = airy_zero(n);
            let a = airy_ai(c(x, 0.0)).re.abs();
            assert!(a <= 1e-12, "|Ai| at zero {n} = {a:.2e}");
        }
    }

    #[test]
    fn zeros_interlace_and_decrease() {
        let zs = airy_zeros(64);
        for i in 1..zs.len() {
            assert!(zs[i] < zs[i - 1]);
        }
        // spacing shrinks like the derivative of the asymptotic law
        assert!(zs[63] < -44.0 && zs[63] > -45.5);
    }
}
