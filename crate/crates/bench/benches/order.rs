use criterion::{black_box, criterion_group, criterion_main, Criterion};

use ct_core::survey::survey_orders;
use ct_core::{order_of_product, ClassTransposition, OracleConfig, RcwaMap, SurveyConfig};

fn ct(s: &str) -> ClassTransposition {
    s.parse().expect("valid class transposition")
}

fn compose(c: &mut Criterion) {
    let sigma = RcwaMap::product(&ct("[0(2),1(4)]"), &ct("[1(3),2(6)]")).unwrap();
    c.bench_function("compose order-12 product with itself", |b| {
        b.iter(|| black_box(&sigma).compose(black_box(&sigma)).unwrap())
    });
    let slanted = RcwaMap::product(&ct("[0(2),1(2)]"), &ct("[1(2),2(4)]")).unwrap();
    c.bench_function("power scan to modulus blowup", |b| {
        b.iter(|| black_box(&slanted).power_order_scan(512, 1_000_000).unwrap())
    });
}

fn oracle(c: &mut Criterion) {
    let cfg = OracleConfig::default();
    let cases = [
        ("common vertex", "[0(2),1(2)]", "[0(2),1(4)]"),
        ("horizontal", "[0(3),1(3)]", "[0(4),2(4)]"),
        ("scan", "[0(2),1(4)]", "[1(3),2(3)]"),
    ];
    for (name, a, b) in cases {
        let (a, b) = (ct(a), ct(b));
        c.bench_function(&format!("oracle {name}"), |bench| {
            bench.iter(|| order_of_product(black_box(&a), black_box(&b), &cfg).unwrap())
        });
    }
}

fn survey(c: &mut Criterion) {
    let mut group = c.benchmark_group("survey");
    group.sample_size(10);
    let cfg = SurveyConfig::new(4);
    group.bench_function("mod_max 4", |b| b.iter(|| survey_orders(black_box(&cfg)).unwrap()));
    group.finish();
}

criterion_group!(benches, compose, oracle, survey);
criterion_main!(benches);
