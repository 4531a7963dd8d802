//! Regenerates the bundled experiment documents under `data/`.
//!
//! Run from the crate root: `cargo run -p borel-core --example gen_data`.
//! The outputs are committed; this exists so the fixtures stay reproducible.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use borel_core::cocycle::{GroupPresentation, TwistMap};
use borel_core::doc::{
    matrix_doc, BoundaryMapDoc, CocycleDoc, EstimatorDoc, ExperimentDocument, PointSpec,
    PresentationDoc, SpaceDoc, TableEntryDoc, VolumeDoc,
};
use borel_core::projflag::{veronese, ProjPoint};

fn fig8_presentation() -> (GroupPresentation, PresentationDoc) {
    let p = GroupPresentation::figure_eight();
    let generators: BTreeMap<String, _> = p
        .generator_names()
        .iter()
        .map(|n| (n.clone(), matrix_doc(p.generator(n).unwrap().matrix())))
        .collect();
    let doc = PresentationDoc {
        generators,
        relators: vec!["a b^-1 a^-1 b a b^-1 a b a^-1 b^-1".into()],
    };
    (p, doc)
}

fn z5_space() -> SpaceDoc {
    SpaceDoc {
        points: (0..5).map(|i| format!("x{i}")).collect(),
        weights: vec![0.2; 5],
        action: [
            ("a".to_string(), vec![1, 2, 3, 4, 0]),
            ("b".to_string(), vec![1, 2, 3, 4, 0]),
        ]
        .into_iter()
        .collect(),
    }
}

fn sym_power_doc(n: usize) -> ExperimentDocument {
    let (_, presentation) = fig8_presentation();
    ExperimentDocument {
        n,
        presentation,
        space: z5_space(),
        cocycle: CocycleDoc {
            kind: "sym-power".into(),
            conjugate: None,
            twist: None,
            representation: None,
            table: None,
        },
        boundary_map: Some(BoundaryMapDoc {
            kind: "veronese".into(),
            conjugate: None,
            twist: None,
            entries: None,
        }),
        partition: None,
        estimator: Some(EstimatorDoc {
            samples: Some(200),
            seed: Some(7),
        }),
        vol_m: Some(VolumeDoc::Tetrahedra {
            regular_tetrahedra: 2,
        }),
    }
}

fn block_doc(parts: Vec<usize>) -> ExperimentDocument {
    let mut doc = sym_power_doc(parts.iter().sum());
    doc.cocycle.kind = "block".into();
    doc.boundary_map.as_mut().unwrap().kind = "block".into();
    doc.partition = Some(parts);
    doc
}

fn twisted_doc() -> ExperimentDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let twist = TwistMap::random(&mut rng, 5, 3, 20.0);
    let mats: Vec<_> = (0..twist.len())
        .map(|x| matrix_doc(twist.get(x).matrix()))
        .collect();
    let mut doc = sym_power_doc(3);
    doc.cocycle.twist = Some(mats.clone());
    doc.boundary_map = Some(BoundaryMapDoc {
        kind: "twisted-veronese".into(),
        conjugate: None,
        twist: Some(mats),
        entries: None,
    });
    doc
}

/// Table boundary over the depth-1 generator orbit of the regular
/// tetrahedron vertices, with one deliberately corrupted flag: the entry at
/// ξ = a·1 = 2, x = x1 carries the Veronese flag of an unrelated point, so
/// the equivariance check fails and the document is refused.
fn corrupted_table_doc() -> ExperimentDocument {
    let (p, _) = fig8_presentation();
    let n = 3;
    let base = ProjPoint::regular_tetrahedron();
    let mut points: Vec<ProjPoint> = base.to_vec();
    for name in ["a", "b"] {
        let g = p.generator(name).unwrap();
        for b in &base {
            let img = b.apply_mobius(g);
            if points.iter().all(|q| q.chordal_distance(&img) > 1e-9) {
                points.push(img);
            }
        }
    }
    let bad_xi = base[1].apply_mobius(p.generator("a").unwrap());
    let bad_flag = veronese(
        &ProjPoint::from_affine(num_complex::Complex64::new(5.0, 5.0)).unwrap(),
        n,
    );
    let mut entries = Vec::new();
    for xi in &points {
        for x in 0..5 {
            let corrupt = x == 1 && xi.chordal_distance(&bad_xi) < 1e-12;
            let flag = if corrupt {
                bad_flag.clone()
            } else {
                veronese(xi, n)
            };
            entries.push(TableEntryDoc {
                xi: PointSpec::from_point(xi),
                x: format!("x{x}"),
                flag: matrix_doc(flag.basis()),
            });
        }
    }
    let mut doc = sym_power_doc(n);
    doc.boundary_map = Some(BoundaryMapDoc {
        kind: "table".into(),
        conjugate: None,
        twist: None,
        entries: Some(entries),
    });
    doc
}

fn write(dir: &Path, name: &str, doc: &ExperimentDocument) {
    let path = dir.join(name);
    let json = serde_json::to_string_pretty(doc).expect("documents serialize");
    fs::write(&path, json + "\n").unwrap_or_else(|e| panic!("write {}: {e}", path.display()));
    println!("wrote {}", path.display());
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    fs::create_dir_all(&dir).expect("create data dir");
    write(&dir, "fig8_pi2.json", &sym_power_doc(2));
    write(&dir, "fig8_pi3.json", &sym_power_doc(3));
    write(&dir, "fig8_pi4.json", &sym_power_doc(4));
    write(&dir, "fig8_twisted_pi3.json", &twisted_doc());
    write(&dir, "fig8_diag.json", &block_doc(vec![1, 1, 1]));
    write(&dir, "fig8_block21.json", &block_doc(vec![2, 1]));
    write(&dir, "fig8_corrupted_table.json", &corrupted_table_doc());
}
