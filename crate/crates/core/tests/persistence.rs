use std::fs;
use std::path::Path;

use bicrec::engine::{load_state, EngineConfig, EngineState};
use bicrec::store::{load_dataset, save_dataset, FACULTIES_FILE, LOG_FILE, USAGE_FILE, VISITS_FILE};
use bicrec::{Dataset, FormalContext};
use proptest::prelude::*;

const FILES: [&str; 4] = [FACULTIES_FILE, USAGE_FILE, VISITS_FILE, LOG_FILE];

fn snapshot(dir: &Path) -> Vec<Vec<u8>> {
    FILES.iter().map(|f| fs::read(dir.join(f)).unwrap()).collect()
}

fn dataset() -> impl Strategy<Value = Dataset> {
    (1usize..=8, 1usize..=8).prop_flat_map(|(n_fac, n_attr)| {
        (
            prop::collection::vec(any::<bool>(), n_fac * n_attr),
            prop::collection::vec((0usize..10, 0usize..n_fac), 0..40),
        )
            .prop_map(move |(incidence, visits)| {
                let pairs: Vec<(String, String)> = (0..n_fac * n_attr)
                    .filter(|&i| incidence[i])
                    .map(|i| (format!("f{}", i / n_attr), format!("a-{}", i % n_attr)))
                    .collect();
                let catalog = FormalContext::new(
                    (0..n_fac).map(|i| format!("f{i}")),
                    (0..n_attr).map(|i| format!("a-{i}")),
                    pairs,
                )
                .unwrap();
                let mut data = Dataset::fresh(catalog);
                for (u, s) in visits {
                    data.record(&format!("user_{u}"), &format!("f{s}")).unwrap();
                }
                data
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn save_load_save_is_byte_identical(data in dataset()) {
        let dir = tempfile::tempdir().unwrap();
        save_dataset(&data, dir.path()).unwrap();
        let first = snapshot(dir.path());
        let loaded = load_dataset(dir.path()).unwrap();
        prop_assert_eq!(&loaded, &data);
        save_dataset(&loaded, dir.path()).unwrap();
        prop_assert_eq!(snapshot(dir.path()), first);
    }

    #[test]
    fn mutate_save_load_cycles(data in dataset(), steps in prop::collection::vec((0usize..6, 0usize..8), 1..12)) {
        let dir = tempfile::tempdir().unwrap();
        let config = EngineConfig { data_dir: dir.path().to_path_buf(), ..EngineConfig::default() };
        let mut state = EngineState { data, config };
        state.save().unwrap();
        for (u, s) in steps {
            let faculty = format!("f{s}");
            match state.apply_visit(&format!("user_{u}"), &faculty) {
                Ok(next) => state = next,
                Err(bicrec::Error::UnknownFaculty(_)) => {
                    prop_assert!(state.catalog().faculty_index(&faculty).is_none());
                }
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
            prop_assert_eq!(&load_state(dir.path()).unwrap(), &state);
        }
    }
}
