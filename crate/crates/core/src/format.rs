/// Formats a float with 17 significant digits, the stable report format.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        String::from("NaN")
    } else if x > 0.0 {
        String::from("inf")
    } else {
        String::from("-inf")
    }
}
