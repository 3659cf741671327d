//! Writes the synthetic 10x4.5 propeller table shipped in `data/`.
//!
//! Thrust follows the published thrust surrogate with a mild log-RPM
//! Reynolds correction; torque comes from momentum theory with an induced
//! power factor and blade profile drag. Values are printed at the precision
//! of manufacturer tables (3 decimals in lbf and in·lbf), so a refit sees
//! realistic quantization.
//!
//! cargo run --example gen_prop_table > data/apc_reference_10x4.5.dat

use std::f64::consts::PI;

use liftwing::fitting::Unit;
use liftwing::PolySurrogate;

const RHO: f64 = 1.225;
const DIAMETER: f64 = 0.254;
const KAPPA: f64 = 1.15;
const SOLIDITY: f64 = 0.1;
const PROFILE_CD: f64 = 0.02;

fn main() {
    let thrust_fit = PolySurrogate::published_thrust();
    let area = PI * DIAMETER * DIAMETER / 4.0;
    let radius = DIAMETER / 2.0;

    println!("         10x4.5 synthetic reference table (liftwing fixture)");
    println!();
    for rpm in (2000..=10000).step_by(1000) {
        let n = f64::from(rpm);
        let omega = n * 2.0 * PI / 60.0;
        let rev_s = n / 60.0;
        println!("   PROP RPM =     {rpm}");
        println!();
        println!("     V          J           Ct          Cp        Torque      Thrust");
        println!("   (mph)      (Adv_Ratio)   (-)         (-)       (In-Lbf)    (Lbf)");
        for mph in (0..=46).step_by(2) {
            let v_mph = f64::from(mph);
            let vp = Unit::MilePerHour.to_si(v_mph);
            let thrust = thrust_fit.eval_unchecked(n, vp) * (1.0 + 0.02 * (n / 6000.0).ln());
            if thrust <= 0.0 {
                break;
            }
            let vi = 0.5 * (-vp + (vp * vp + 2.0 * thrust / (RHO * area)).sqrt());
            let profile = RHO * area * (omega * radius).powi(3) * SOLIDITY * PROFILE_CD / 8.0;
            let torque = (KAPPA * thrust * (vp + vi) + profile) / omega;
            let j = vp / (rev_s * DIAMETER);
            let ct = thrust / (RHO * rev_s * rev_s * DIAMETER.powi(4));
            let cp = 2.0 * PI * torque / (RHO * rev_s * rev_s * DIAMETER.powi(5));
            println!(
                "   {:5.1}      {:6.3}      {:7.4}     {:7.4}     {:7.3}     {:7.3}",
                v_mph,
                j,
                ct,
                cp,
                Unit::InchPoundForce.from_si(torque),
                Unit::PoundForce.from_si(thrust),
            );
        }
        println!();
    }
}
