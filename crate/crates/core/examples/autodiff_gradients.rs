//! Records a small ReLU network on the tape, backpropagates, and compares
//! the input gradient with central differences.

use alden::autodiff::{finite_difference_check, Tape, Tensor, Var};

fn network(tape: &mut Tape, x: Var) -> alden::Result<Var> {
    let w1 = tape.constant(Tensor::matrix(2, 3, vec![0.5, -1.0, 0.3, 0.8, 0.2, -0.6])?);
    let b1 = tape.constant(Tensor::vector(vec![0.1, -0.2, 0.05]));
    let w2 = tape.constant(Tensor::matrix(3, 1, vec![1.5, -0.7, 1.2])?);
    let h = tape.matmul(x, w1)?;
    let h = tape.add_bias(h, b1)?;
    let h = tape.relu(h)?;
    let y = tape.matmul(h, w2)?;
    let y = tape.sigmoid(y)?;
    tape.sum(y)
}

fn main() -> alden::Result<()> {
    let point = Tensor::matrix(1, 2, vec![0.7, -0.4])?;

    let mut tape = Tape::new();
    let x = tape.leaf(point.clone(), true);
    let y = network(&mut tape, x)?;
    tape.backward(y)?;
    println!("y = {:.6}", tape.value(y).item()?);
    println!("dy/dx = {:?}", tape.grad(x).unwrap());
    println!("nodes on tape: {}", tape.len());

    let err = finite_difference_check(network, &point, 1e-5)?;
    println!("max relative finite difference error: {err:.2e}");
    Ok(())
}
