use partial_knn::{plaknn, Bag, LabelSpace, NeighborIndex, PartialDataset, PartialExample, PlaknnConfig};

fn main() -> partial_knn::Result<()> {
    let space = LabelSpace::new(3)?;
    let rows = [(0.0, vec![1]), (0.2, vec![1, 2]), (0.4, vec![1, 3]), (5.0, vec![2]), (5.3, vec![2, 3])];
    let examples = rows
        .iter()
        .map(|(x, bag)| Ok(PartialExample { x: vec![*x], bag: Bag::from_labels(bag.iter().copied(), space)?, truth: None }))
        .collect::<partial_knn::Result<Vec<_>>>()?;
    let train = PartialDataset::new(examples, space)?;
    let index = NeighborIndex::build(&train.features())?;

    let (label, trace) = plaknn::classify(&train, &index, &[0.1], &PlaknnConfig::default())?;
    println!("label {label} after {} neighbors", trace.iterations.len());
    Ok(())
}
