//! `verify dump-tables`: structure-constant tables, factor sets, and
//! canonical bases written as JSON for external inspection.

use crate::config::RunConfig;
use anyhow::{Context, Result};
use serde_json::{json, Value};
use std::path::Path;
use supermoyal::clifford_fine::{rho_star, sigma_clifford};
use supermoyal::scalar::C64;
use supermoyal::starproduct::{lambda_closedform, DeformParams};
use supermoyal::supersymplectic::GradedForm;

fn c64_json(z: C64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn write_json(dir: &Path, name: &str, value: &Value) -> Result<()> {
    let path = dir.join(name);
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(&path, text + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn dump_tables(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<String>> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;
    let params = DeformParams::new(C64::new(cfg.a0, 0.0), C64::new(cfg.alpha_re, cfg.alpha_im))?;
    let mut written = Vec::new();

    // Structure constants Lambda(I, J) for 0..=n.
    for n in 0..=cfg.n {
        let table = lambda_closedform(n, &params)?;
        let entries: Vec<Value> = table
            .entries()
            .map(|(i, j, c)| {
                json!({
                    "i_mask": i.mask(),
                    "j_mask": j.mask(),
                    "target_mask": table.target(i, j).mask(),
                    "coefficient": c64_json(*c),
                })
            })
            .collect();
        let name = format!("lambda_n{n}.json");
        write_json(
            out_dir,
            &name,
            &json!({ "n": n, "a0": cfg.a0, "alpha_re": cfg.alpha_re, "alpha_im": cfg.alpha_im,
                     "entries": entries }),
        )?;
        written.push(name);
    }

    // The Clifford factor set on (Z_2)^n.
    for n in 0..=cfg.n.max(3) {
        let sigma = sigma_clifford(n);
        let order = sigma.order() as u32;
        let entries: Vec<Value> = (0..order)
            .flat_map(|a| {
                let sigma = &sigma;
                (0..order).map(move |b| {
                    json!({ "a": a, "b": b, "value": c64_json(sigma.value(a, b)) })
                })
            })
            .collect();
        let name = format!("sigma_cl_n{n}.json");
        write_json(out_dir, &name, &json!({ "n": n, "entries": entries }))?;
        written.push(name);
    }

    // The basis rescaling realizing the equivalence sigma_cl ~ sigma_star.
    if cfg.n >= 1 {
        let rho = rho_star(&params, cfg.n, false);
        let entries: Vec<Value> = rho
            .iter()
            .enumerate()
            .map(|(mask, z)| json!({ "mask": mask, "value": c64_json(*z) }))
            .collect();
        let name = format!("rho_star_n{}.json", cfg.n);
        write_json(out_dir, &name, &json!({ "n": cfg.n, "entries": entries }))?;
        written.push(name);
    }

    // Canonical graded symplectic blocks for the configured dimensions.
    let canonical = GradedForm::canonical(cfg.m / 2, cfg.n.max(1), 1);
    let to_rows = |m: &ndarray::Array2<f64>| -> Vec<Vec<f64>> {
        m.rows().into_iter().map(|r| r.to_vec()).collect()
    };
    let name = "canonical_form.json".to_string();
    write_json(
        out_dir,
        &name,
        &json!({
            "even_block": to_rows(canonical.even_block()),
            "odd_block": to_rows(canonical.odd_block()),
        }),
    )?;
    written.push(name);

    Ok(written)
}
