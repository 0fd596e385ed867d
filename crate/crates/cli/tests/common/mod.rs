#![allow(dead_code)]

use binae::classic::{hamming74_codebook, Codebook};
use binae::nn::NetParams;
use binae::numerics::{Matrix, Rng, Stream};

/// A network whose encoder emits Hamming(7,4) and whose decoder correlates
/// the received word with every codeword, which is exactly ML decoding.
pub fn hamming_network() -> NetParams {
    network_for(&hamming74_codebook())
}

pub fn network_for(cb: &Codebook) -> NetParams {
    let (m, n) = (cb.size(), cb.n());
    let mut net = NetParams::init(cb.k(), n, &mut Rng::new(0, Stream::Init)).unwrap();
    let symbol = |word: usize, i: usize| cb.word(word).symbols()[i] as f64;
    net.encoder.input.weight = Matrix::identity(m);
    net.encoder.input.bias = vec![0.0; m];
    net.encoder.output.weight = Matrix::from_fn(n, m, |i, w| symbol(w, i));
    net.encoder.output.bias = vec![0.0; n];
    net.decoder.hidden.weight = Matrix::from_fn(m, n, |w, i| symbol(w, i));
    net.decoder.hidden.bias = vec![0.0; m];
    net.decoder.output.weight = Matrix::from_fn(m, m, |r, c| if r == c { 4.0 } else { 0.0 });
    net.decoder.output.bias = vec![0.0; m];
    net
}

/// A (7,4) code with minimum distance 2: four message bits, one overall
/// parity bit and two constant positions.
pub fn distance_two_codebook() -> Codebook {
    let row: &[u8] = &[1, 0, 0];
    binae::classic::GeneratorMatrix::systematic(&[row, row, row, row]).unwrap().codebook()
}
