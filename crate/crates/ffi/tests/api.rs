use std::ffi::{CStr, CString};
use std::ptr;

use bqlab_ffi::*;

fn oracle_from_table(bits: &str) -> *mut BqOracle {
    let table = CString::new(bits).unwrap();
    let mut o = ptr::null_mut();
    assert_eq!(unsafe { bq_oracle_from_table(table.as_ptr(), &mut o) }, BqStatus::Ok);
    assert!(!o.is_null());
    o
}

fn count(o: *const BqOracle) -> u64 {
    let mut n = 0;
    assert_eq!(unsafe { bq_oracle_count(o, &mut n) }, BqStatus::Ok);
    n
}

fn last_error() -> String {
    let p = bq_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn deutsch_over_all_tables() {
    for (table, parity) in [("00", 0), ("01", 1), ("10", 1), ("11", 0)] {
        let o = oracle_from_table(table);
        let mut run = BqRun::default();
        assert_eq!(unsafe { bq_deutsch_parity(o, &mut run) }, BqStatus::Ok);
        assert_eq!((run.value, run.width, run.queries), (parity, 1, 1));
        assert!(run.probability > 1.0 - 1e-9);
        assert_eq!(count(o), 1);
        unsafe { bq_oracle_free(o) };
    }
}

#[test]
fn chain_search_from_spec_text() {
    let spec = CString::new("chain 6 3").unwrap();
    let mut o = ptr::null_mut();
    assert_eq!(unsafe { bq_oracle_from_spec(spec.as_ptr(), &mut o) }, BqStatus::Ok);
    assert_eq!(unsafe { bq_oracle_query_width(o) }, 3);

    let mut run = BqRun::default();
    assert_eq!(unsafe { bq_chain_parity_search(o, 6, &mut run) }, BqStatus::Ok);
    assert_eq!((run.value, run.queries), (1, 2));

    let mut previous = 0;
    assert_eq!(unsafe { bq_oracle_reset(o, &mut previous) }, BqStatus::Ok);
    assert_eq!(previous, 2);
    let mut parity = false;
    assert_eq!(unsafe { bq_classical_chain_parity(o, 6, &mut parity) }, BqStatus::Ok);
    assert!(parity);
    assert_eq!(count(o), 3);

    assert_eq!(unsafe { bq_chain_parity_search(o, 5, &mut run) }, BqStatus::Contract);
    assert!(last_error().contains("2^(k+1) - 2"));
    unsafe { bq_oracle_free(o) };
}

#[test]
fn parallel_parity_and_two_point() {
    let o = oracle_from_table("1011");
    let queries = [0u64, 1, 2, 3];
    let mut run = BqRun::default();
    assert_eq!(
        unsafe { bq_pairwise_parallel_parity(o, queries.as_ptr(), 4, &mut run) },
        BqStatus::Ok
    );
    assert_eq!((run.value, run.queries), (1, 2));
    assert_eq!(
        unsafe { bq_pairwise_parallel_parity(o, queries.as_ptr(), 3, &mut run) },
        BqStatus::Contract
    );

    assert_eq!(unsafe { bq_two_point_parity(o, 1, 3, &mut run) }, BqStatus::Ok);
    assert_eq!(run.value, 1);
    assert_eq!(unsafe { bq_two_point_parity(o, 2, 2, &mut run) }, BqStatus::Contract);

    let mut answer = false;
    assert_eq!(unsafe { bq_oracle_query(o, 2, &mut answer) }, BqStatus::Ok);
    assert!(answer);
    unsafe { bq_oracle_free(o) };
}

#[test]
fn extraction() {
    let mut o = ptr::null_mut();
    assert_eq!(unsafe { bq_oracle_inner_product(0b1011, 4, &mut o) }, BqStatus::Ok);
    let mut run = BqRun::default();
    assert_eq!(unsafe { bq_bv_extract(o, &mut run) }, BqStatus::Ok);
    assert_eq!((run.value, run.width, run.queries), (0b1011, 4, 1));
    unsafe { bq_oracle_free(o) };

    // OR is not an inner product
    let o = oracle_from_table("0111");
    assert_eq!(unsafe { bq_bv_extract(o, &mut run) }, BqStatus::Exactness);
    unsafe { bq_oracle_free(o) };

    let spec = CString::new("innerproduct 1 3 101 011").unwrap();
    let mut o = ptr::null_mut();
    assert_eq!(unsafe { bq_oracle_from_spec(spec.as_ptr(), &mut o) }, BqStatus::Ok);
    assert_eq!(unsafe { bq_extract_function(o, 1, 3, 1, &mut run) }, BqStatus::Ok);
    assert_eq!((run.value, run.width, run.queries), (0b011, 3, 1));
    unsafe { bq_oracle_free(o) };
}

#[test]
fn error_statuses() {
    let mut o = ptr::null_mut();
    let bad = CString::new("table 012").unwrap();
    assert_eq!(unsafe { bq_oracle_from_spec(bad.as_ptr(), &mut o) }, BqStatus::Parse);
    assert!(last_error().contains("<spec>:1"));
    assert!(o.is_null());

    assert_eq!(
        unsafe { bq_oracle_from_table(ptr::null(), &mut o) },
        BqStatus::NullPointer
    );
    let mut run = BqRun::default();
    assert_eq!(
        unsafe { bq_deutsch_parity(ptr::null_mut(), &mut run) },
        BqStatus::NullPointer
    );

    let wide = oracle_from_table("0110");
    assert_eq!(unsafe { bq_deutsch_parity(wide, ptr::null_mut()) }, BqStatus::Contract);
    assert_eq!(unsafe { bq_deutsch_parity(wide, &mut run) }, BqStatus::Contract);
    unsafe { bq_oracle_free(wide) };
    unsafe { bq_oracle_free(ptr::null_mut()) };
}

#[test]
fn table_json_and_version() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { bq_table_json(2, &mut s) }, BqStatus::Ok);
    let json = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { bq_string_free(s) };
    let rows: Vec<bqlab::cli::ExperimentReport> = serde_json::from_str(&json).unwrap();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r.exact));
    assert_eq!(unsafe { bq_table_json(9, &mut s) }, BqStatus::Contract);

    let v = unsafe { CStr::from_ptr(bq_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
