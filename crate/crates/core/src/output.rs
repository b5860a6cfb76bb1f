//! CSV column layout and number formatting for run records.

use crate::scenario::{RunRecord, SystemKind};

pub const BASE_COLUMNS: [&str; 16] = [
    "t", "rho00_re", "rho01_re", "rho01_im", "rho11_re", "g_re", "g_im", "E", "P", "J", "W", "Q", "S", "dSdt", "sigma",
    "residual",
];

pub const PHOTOCELL_COLUMNS: [&str; 16] = [
    "I", "V", "Pout", "PD", "eta", "E_D", "E_A", "J_D", "J_A", "S_D", "S_A", "rho00", "rho11", "rho22", "rho33",
    "eta_inst",
];

pub fn columns(system: SystemKind) -> Vec<&'static str> {
    let mut out = BASE_COLUMNS.to_vec();
    if system == SystemKind::Photocell {
        out.extend_from_slice(&PHOTOCELL_COLUMNS);
    }
    out
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

/// Undefined values become empty fields.
pub fn format_optional(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

pub fn fields(record: &RunRecord) -> Vec<String> {
    let th = &record.thermo;
    let rho = &record.rho;
    let mut out: Vec<String> = [
        th.t,
        rho[(0, 0)].re,
        rho[(0, 1)].re,
        rho[(0, 1)].im,
        rho[(1, 1)].re,
        record.g.re,
        record.g.im,
        th.energy,
        th.power,
        th.heat_current,
        th.work,
        th.heat,
        th.entropy,
        th.entropy_rate,
    ]
    .into_iter()
    .map(format_number)
    .collect();
    out.push(format_optional(th.entropy_production));
    out.push(format_number(th.first_law_residual));

    if let Some(pc) = &record.photocell {
        let e = &pc.electrical;
        let s = &pc.split;
        out.push(format_number(e.current));
        out.push(format_optional(e.voltage));
        out.push(format_optional(e.output_power));
        out.push(format_number(e.donor_power));
        out.push(format_optional(pc.efficiency));
        for x in [s.e_d, s.e_a, s.j_d, s.j_a, s.s_d, s.s_a] {
            out.push(format_number(x));
        }
        for k in 0..4 {
            out.push(format_number(rho[(k, k)].re));
        }
        out.push(format_optional(pc.efficiency_instant));
    }
    out
}
