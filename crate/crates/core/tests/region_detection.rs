use dtsynth::descriptors::learn_dictionary;
use dtsynth::pipeline::{extract_features, required_kinds, train_pipeline, FeatureStore};
use dtsynth::regions::{coarse_mask, detect_region, spatial_score};
use dtsynth::synthetic::{dictionary_corpus, labelled_corpus, planted_patch_video, toy_config, CorpusSpec};

#[test]
fn planted_patch_is_found() {
    let config = toy_config();
    let spec = CorpusSpec::default();
    let dict = learn_dictionary(
        &dictionary_corpus(CorpusSpec { per_class: 4, ..spec }, 1),
        &config.dictionary,
        1,
    )
    .unwrap();
    let (videos, manifest) = labelled_corpus(spec, 2);
    let mut store = FeatureStore::new(config.features.external_source);
    for v in &videos {
        store
            .insert_set(
                v.source_id(),
                extract_features(v, &required_kinds(&config), Some(&dict), &config).unwrap(),
            )
            .unwrap();
    }
    let pipeline = train_pipeline(&manifest, &store, &config, 4).unwrap();

    {
        let seed = 3;
        let (video, planted) = planted_patch_video(256, 64, 16, seed);
        let mask = coarse_mask(&video).unwrap();
        let res = detect_region(&video, &pipeline, Some(&dict), Some(mask), seed).unwrap();
        assert_eq!(res.candidates.len(), config.regions.count);
        let rescored = res
            .candidates
            .iter()
            .map(|c| spatial_score(&video.crop(c.rect).unwrap(), &pipeline, Some(&dict), &config).unwrap())
            .fold(f64::MIN, f64::max);
        assert_eq!(res.best.score, rescored);
        assert!(res.best.rect.iou(&planted) >= 0.3, "{:?} vs {planted:?}", res.best.rect);
        assert_eq!(res, detect_region(&video, &pipeline, Some(&dict), None, seed).unwrap());
    }
}
