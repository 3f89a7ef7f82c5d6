use macmod::rotation::{rotation_search, MetricConfig};

fn main() {
    let r = rotation_search(4, 4, &MetricConfig::new(0.1)).unwrap();
    println!("(4,4) sigma2=0.1 minimizers: {:?}", r.minimizers);
    let grid_min = r.objective_values.iter().map(|&(_, v)| v).fold(f64::INFINITY, f64::min);
    println!("grid min {grid_min}");
    let mut near: Vec<(f64, f64)> = r
        .objective_values
        .iter()
        .filter(|&&(_, v)| v <= grid_min + 1e-6)
        .cloned()
        .collect();
    near.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    println!("grid points within 1e-6 of min: {near:?}");
}
