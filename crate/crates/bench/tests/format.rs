use amop_bench::table::{format_g9, Cell, Table};

/// Reference strings from C `printf("%.9g")`.
const C_PRINTF: &[(f64, &str)] = &[
    (1.0, "1"),
    (0.1, "0.1"),
    (1.0 / 3.0, "0.333333333"),
    (66.66666666666666, "66.6666667"),
    (123456789.0, "123456789"),
    (1234567890.0, "1.23456789e+09"),
    (1e-5, "1e-05"),
    (1.5e-5, "1.5e-05"),
    (0.0001, "0.0001"),
    (0.00012345678912, "0.000123456789"),
    (-2.5, "-2.5"),
    (1e300, "1e+300"),
    (-1e-300, "-1e-300"),
    (100.0, "100"),
    (1e-17, "1e-17"),
    (99999999.95, "100000000"),
    (999999999.5, "1e+09"),
    (0.552486188, "0.552486188"),
    (5e-324, "4.94065646e-324"),
    (0.0, "0"),
];

#[test]
fn matches_c_printf() {
    for &(x, want) in C_PRINTF {
        assert_eq!(format_g9(x), want, "{x:e}");
    }
    assert_eq!(format_g9(f64::NAN), "nan");
    assert_eq!(format_g9(f64::NEG_INFINITY), "-inf");
}

#[test]
fn nine_digits_round_trip_to_nine_digits() {
    let mut x = 0.123456789123f64;
    for _ in 0..200 {
        let s = format_g9(x);
        let back: f64 = s.parse().unwrap();
        assert!((back - x).abs() <= 5e-9 * x.abs(), "{x} -> {s}");
        x *= -3.7;
    }
}

#[test]
fn csv_layout() {
    let mut t = Table::new(["name", "value"]);
    t.push(vec!["a,b".into(), Cell::from(0.5)]);
    t.push(vec!["say \"hi\"".into(), Cell::from(3usize)]);
    let csv = t.to_csv(&["first".into(), "two\nlines".into()]);
    assert_eq!(csv, "# first\n# two\n# lines\nname,value\n\"a,b\",0.5\n\"say \"\"hi\"\"\",3\n");
    assert!(!csv.contains('\r'));
}

#[test]
#[should_panic(expected = "row width")]
fn ragged_rows_are_rejected() {
    Table::new(["a", "b"]).push(vec![Cell::from(1usize)]);
}
