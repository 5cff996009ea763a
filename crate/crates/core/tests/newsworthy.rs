use civiclink::newsworthy::{
    generate_newsworthy_dataset, run_cutoff_grid, run_section_grid, GridSettings, NewsworthySynthParams,
    PromptSections,
};

fn roc(rows: &[civiclink::newsworthy::GridRow]) -> Vec<f64> {
    rows.iter().map(|r| r.metrics.as_ref().expect("valid cell").roc_auc).collect()
}

#[test]
fn cutoff_grid_is_stable_under_stationary_signal() {
    let data = generate_newsworthy_dataset(11, &NewsworthySynthParams::default()).unwrap();
    let rows = run_cutoff_grid(&data, &[2017, 2018, 2019, 2020, 2021], &GridSettings::default()).unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows.windows(2).all(|w| w[0].n_train <= w[1].n_train));
    assert_eq!(rows[0].cell, "'13-'16");
    let r = roc(&rows);
    let spread = r.iter().cloned().fold(f64::MIN, f64::max) - r.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 0.10, "roc {r:?}");
}

#[test]
fn masking_the_policy_text_removes_the_signal() {
    let data = generate_newsworthy_dataset(12, &NewsworthySynthParams::default()).unwrap();
    let grid = [
        PromptSections::FULL,
        PromptSections::FULL.without_policy(),
        PromptSections::FULL.without_public(),
    ];
    let rows = run_section_grid(&data, &grid, &GridSettings::default()).unwrap();
    let r = roc(&rows);
    assert!(r[0] - r[1] >= 0.15, "roc {r:?}");
    assert!((r[0] - r[2]).abs() < 0.05, "roc {r:?}");
}

#[test]
fn single_class_cell_is_marked_invalid() {
    let params = NewsworthySynthParams { positive_rate: 0.0, ..Default::default() };
    let mut data = generate_newsworthy_dataset(3, &params).unwrap();
    data.iter_mut().rev().take(50).for_each(|e| e.label = true);
    let rows = run_cutoff_grid(&data, &[2017, 2021], &GridSettings::default()).unwrap();
    assert!(rows.iter().all(|r| r.metrics.is_none() && r.invalid.is_some()));
}
