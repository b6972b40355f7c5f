use proptest::prelude::*;
use quadlabel::{
    equivalent_up_to_relabeling, generate, label_reference, BinaryImage, Engine, EngineConfig,
    Error, Merger, Pattern, Recorder, StackPush,
};

fn run(img: &BinaryImage, bits: u32) -> (quadlabel::FrameResult, Recorder) {
    let mut engine = Engine::new(EngineConfig::for_image(img).with_label_bits(bits)).unwrap();
    let mut rec = Recorder::default();
    let res = engine.process_frame_with(img, &mut rec).unwrap();
    (res, rec)
}

fn push(larger: u32, smaller: u32) -> StackPush {
    StackPush { larger, smaller }
}

#[test]
fn double_merger_group() {
    let img = generate(&Pattern::DoubleMerger, 16, 4).unwrap();
    let (res, rec) = run(&img, 10);
    let ev = rec
        .groups
        .iter()
        .find(|e| e.ctx.row == 3 && e.ctx.group == 1)
        .unwrap();
    assert_eq!(ev.ctx.prev_row, [1, 0, 4, 0, 7, 0]);
    assert_eq!(ev.output.labels.labels, [1, 4, 4, 7]);
    assert_eq!(
        ev.output.mergers.as_slice(),
        &[Merger::new(4, 1), Merger::new(7, 1)]
    );
    assert!(ev.output.pause);
    assert_eq!(res.stats.pause_cycles, 1);
    assert_eq!(ev.emitted.labels, [1, 1, 1, 1]);
    assert!(equivalent_up_to_relabeling(&res.final_image, &label_reference(&img)).unwrap());
}

#[test]
fn ascending_chain_resolves_in_one_drain() {
    let img = generate(&Pattern::AscendingChain { links: 4 }, 24, 10).unwrap();
    let (res, rec) = run(&img, 10);
    let pushes: Vec<StackPush> = rec.groups.iter().flat_map(|e| e.pushes.clone()).collect();
    assert_eq!(pushes, vec![push(9, 7), push(7, 5), push(5, 4), push(4, 2)]);
    for l in [4, 5, 7, 9] {
        assert_eq!(res.final_table.get(l), 2, "t[{l}]");
    }
    assert!(equivalent_up_to_relabeling(&res.final_image, &label_reference(&img)).unwrap());
}

#[test]
fn group_chain_merges_share_a_label() {
    let img = generate(&Pattern::GroupChain, 16, 6).unwrap();
    let (res, rec) = run(&img, 10);
    let ev = rec
        .groups
        .iter()
        .find(|e| e.output.mergers.len() == 2)
        .unwrap();
    let m = ev.output.mergers.as_slice();
    assert_eq!((m[0].larger, m[0].smaller), (5, 2));
    assert_eq!((m[1].larger, m[1].smaller), (3, 2));
    assert!(m.iter().all(|m| m.chain));
    assert_eq!(res.final_table.get(5), 2);
    assert!(equivalent_up_to_relabeling(&res.final_image, &label_reference(&img)).unwrap());
}

#[test]
fn label_exhaustion_is_reported() {
    let img = generate(&Pattern::MaxLabels { components: 1023 }, 128, 64).unwrap();
    assert!(run(&img, 10).0.final_image.max_label() > 0);
    let img = generate(&Pattern::MaxLabels { components: 1024 }, 128, 64).unwrap();
    let mut engine = Engine::new(EngineConfig::for_image(&img)).unwrap();
    let err = engine.process_frame(&img).unwrap_err();
    assert_eq!(err.error, Error::LabelExhausted { max: 1023 });
}

#[test]
fn stress_patterns_match_oracle() {
    let patterns = [
        Pattern::Comb { labels: 200 },
        Pattern::CheckerboardPairs,
        Pattern::Spiral,
        Pattern::Random {
            density: 0.6,
            seed: 3,
        },
    ];
    for p in patterns {
        let img = generate(&p, 96, 80).unwrap();
        let (res, _) = run(&img, 16);
        assert!(
            equivalent_up_to_relabeling(&res.final_image, &label_reference(&img)).unwrap(),
            "{}",
            p.name()
        );
    }
}

fn arb_frame() -> impl Strategy<Value = BinaryImage> {
    (1usize..12, 1usize..24, 0.05f64..0.95).prop_flat_map(|(gw, h, d)| {
        proptest::collection::vec(proptest::bool::weighted(d), gw * 4 * h).prop_map(move |px| {
            BinaryImage::new(gw * 4, h, px.into_iter().map(u8::from).collect()).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn matches_reference(img in arb_frame()) {
        let (res, _) = run(&img, 16);
        prop_assert!(equivalent_up_to_relabeling(&res.final_image, &label_reference(&img)).unwrap());
        prop_assert!(res.stats.max_group_mergers <= 2);
        prop_assert!(res.stats.max_neighbour_labels <= 2);
        prop_assert!(res.final_table.first_non_idempotent().is_none());
        prop_assert!(res.final_table.first_upward().is_none());
    }
}
