use cslgrav::quantity::Dimension;
use cslgrav::{Constants, Q};

fn q(value: f64, unit: &str) -> Q {
    Q::with_unit(value, unit).unwrap()
}

#[test]
fn vacuum_formulas_are_dimensionally_consistent() {
    let k = Constants::cgs();
    let mu = k.planck_mass_q();
    let m = k.nucleon_mass_q();
    let p_tilde = q(1e90, "s/cm^3");
    let a = q(1.4e-5, "cm");
    let g = k.g_q();

    // γ = 1/(4μ²P̃)
    let gamma = mu.powi(2).unwrap().try_mul(p_tilde).unwrap().powi(-1).unwrap();
    assert_eq!(gamma.dimension(), Dimension::GRWP_STRENGTH);

    // K² = (Gμm)²P̃/a is a force squared times a time
    let k2 = g.try_mul(mu).unwrap().try_mul(m).unwrap().powi(2).unwrap().try_mul(p_tilde).unwrap().try_div(a).unwrap();
    assert_eq!(k2.dimension(), Dimension::FORCE.powi(2) * Dimension::TIME);

    // heating K²/m is a power
    assert_eq!(k2.try_div(m).unwrap().dimension(), Dimension::POWER);

    // dipole: G²m²P̃p²/a³ is also K²
    let p = mu.try_mul(a).unwrap();
    let k2d = g.powi(2).unwrap().try_mul(m.powi(2).unwrap()).unwrap().try_mul(p_tilde).unwrap().try_mul(p.powi(2).unwrap()).unwrap();
    let k2d = k2d.try_div(a.powi(3).unwrap()).unwrap();
    assert_eq!(k2d.dimension(), k2.dimension());

    // λ = Gm²/(aħ) is a rate
    let lambda = g.try_mul(m.powi(2).unwrap()).unwrap().try_div(a.try_mul(k.hbar_q()).unwrap()).unwrap();
    assert_eq!(lambda.dimension(), Dimension::RATE);
}

#[test]
fn mismatched_units_rejected() {
    assert!(q(1.0, "cm^3/g").value_in(Dimension::DENSITY).is_err());
    assert!(Q::with_unit(1.0, "furlong").is_err());
}
