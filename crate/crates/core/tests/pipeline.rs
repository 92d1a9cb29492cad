use evdisagg_core::model::Decision;
use evdisagg_core::synth::{generate_day, Bounds, Preset, ScenarioSpec, Span};
use evdisagg_core::{disaggregate, disaggregate_windows, PipelineParams, PowerSeries, WindowSpec};
use proptest::prelude::*;

fn ev_with_train() -> ScenarioSpec {
    ScenarioSpec {
        ev_amp: Bounds::new(3.3, 3.3),
        ev_fixed: vec![Span { start: 600, duration: 130 }],
        ac_train: true,
        ac_spike_amp: Bounds::new(2.8, 3.6),
        noise_max: 0.3,
        ..ScenarioSpec::default()
    }
}

#[test]
fn ev_under_spike_train_is_recovered() {
    // No spike touches either end of the session for this seed.
    let s = generate_day(&ScenarioSpec { seed: 14, ..ev_with_train() }).unwrap();
    let r = disaggregate(&s.aggregate, &PipelineParams::default()).unwrap();
    assert_eq!(r.events.len(), 1, "{:?}", r.diagnostics);
    let ev = r.events[0];
    assert!(ev.start.abs_diff(600) <= 2 && ev.duration.abs_diff(130) <= 2, "{ev:?}");
    assert!((ev.amplitude - 3.3).abs() <= 0.1, "{ev:?}");
}

#[test]
fn ev_under_spike_train_over_seeds() {
    for seed in 0..20 {
        let s = generate_day(&ScenarioSpec { seed, ..ev_with_train() }).unwrap();
        let r = disaggregate(&s.aggregate, &PipelineParams::default()).unwrap();
        assert_eq!(r.events.len(), 1, "seed {seed}: {:?}", r.diagnostics);
        let ev = r.events[0];
        let truth = s.ev_sessions[0];
        // A spike touching either end of the session merges into it, so
        // the event may overhang by up to one spike.
        assert!(ev.start <= truth.start && ev.end() >= truth.end(), "seed {seed}: {ev:?}");
        assert!(truth.start - ev.start <= 30 && ev.end() - truth.end() <= 30, "seed {seed}: {ev:?}");
        assert!((ev.amplitude - 3.3).abs() <= 0.15, "seed {seed}: {ev:?}");
    }
}

#[test]
fn clean_day_matches_truth_exactly() {
    let spec = ScenarioSpec {
        ev_amp: Bounds::new(3.3, 3.3),
        ev_fixed: vec![Span { start: 600, duration: 130 }],
        ..ScenarioSpec::default()
    };
    let s = generate_day(&spec).unwrap();
    let r = disaggregate(&s.aggregate, &PipelineParams::default()).unwrap();
    assert_eq!(r.events.len(), 1);
    assert_eq!((r.events[0].start, r.events[0].duration), (600, 130));
    assert!((r.events[0].amplitude - 3.3).abs() <= 0.1);
}

#[test]
fn month_windows_replicate_the_day() {
    let day = generate_day(&ScenarioSpec { seed: 3, ..ev_with_train() }).unwrap();
    let one = disaggregate(&day.aggregate, &PipelineParams::default()).unwrap();
    assert!(!one.events.is_empty());
    let values: Vec<f64> = day.aggregate.values().repeat(30);
    let month = PowerSeries::new(day.aggregate.start(), values).unwrap();
    let r = disaggregate_windows(&month, WindowSpec::months(), &PipelineParams::default()).unwrap();
    assert_eq!(r.len(), 1);
    assert_eq!(r[0].events.len(), 30 * one.events.len());
}

#[test]
fn degenerate_inputs() {
    use evdisagg_core::{SegmentType, Timestamp};
    let p = PipelineParams::default();
    let t0 = Timestamp::from_civil(2013, 7, 1, 0, 0);

    let r = disaggregate(&PowerSeries::zeros(t0, 1440), &p).unwrap();
    assert!(r.events.is_empty() && r.diagnostics.is_empty());

    let mut v = vec![0.0; 1440];
    v[700] = 5.0;
    let r = disaggregate(&PowerSeries::new(t0, v).unwrap(), &p).unwrap();
    assert!(r.events.is_empty());
    assert_eq!(r.diagnostics.len(), 1);
    assert_eq!(r.diagnostics[0].decision, Decision::SpikeRemoved);

    let r = disaggregate(&PowerSeries::new(t0, vec![3.5; 1440]).unwrap(), &p).unwrap();
    assert!(r.events.is_empty());
    assert_eq!(r.diagnostics[0].kind, Some(SegmentType::Type1));
    assert_eq!(r.diagnostics[0].decision, Decision::TooWide);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn pipeline_invariants(seed in any::<u64>(), preset in 0usize..5) {
        let s = generate_day(&Preset::ALL[preset].spec(seed)).unwrap();
        let p = PipelineParams::default();
        let r = disaggregate(&s.aggregate, &p).unwrap();
        let agg = s.aggregate.values();
        let est = r.estimated_series.values();
        for w in r.events.windows(2) {
            prop_assert!(w[0].end() < w[1].start);
        }
        for ev in &r.events {
            prop_assert!(ev.amplitude >= p.ev_min_amplitude);
            prop_assert!(ev.duration <= p.max_ev_width);
            let peak = agg[ev.start..=ev.end()].iter().cloned().fold(0.0, f64::max);
            prop_assert!(ev.amplitude <= peak + 0.1);
            for rec in r.diagnostics.iter().filter(|d| d.decision == Decision::SpikeRemoved) {
                prop_assert!(rec.end < ev.start || rec.start > ev.end());
            }
        }
        for (i, &e) in est.iter().enumerate() {
            let cover = r.events.iter().find(|ev| ev.start <= i && i <= ev.end());
            match cover {
                Some(ev) => prop_assert_eq!(e, ev.amplitude),
                None => prop_assert_eq!(e, 0.0),
            }
        }
        prop_assert!((r.energy_kwh() - r.estimated_series.energy_kwh()).abs() < 1e-9);
        prop_assert_eq!(disaggregate(&s.aggregate, &p).unwrap(), r);
    }
}
