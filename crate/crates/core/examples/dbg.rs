use ncdr::calculus::*;
use ncdr::homomorph::*;
use ncdr::ncpoly::NcElement;
fn main() {
    let q = ncdr::RatFunc::q();
    let c3 = build_3d(&q);
    let a = NcElement::generator(&c3.alg, 1);
    let w0 = FormElement::sym(&c3, 0);
    let out = left_action_on_invariants(&a, &w0).unwrap();
    println!("a |> w0 = {out}");

    let h3 = build_h3(&q);
    let pi = pi_star(&c3, &h3).unwrap();
    let txh = tensor_calculus(&c3, &h3, "");
    let rho = rho_star(&c3, &txh, &pi).unwrap();
    let t3 = tensor_calculus(&txh, &h3, "2");
    println!("t3 gens: {:?}", (0..t3.alg.num_gens()).map(|i| t3.alg.gen_name(i)).collect::<Vec<_>>());
    println!("t3 syms: {:?}", (0..t3.num_syms()).map(|i| t3.sym_name(i)).collect::<Vec<_>>());
    let _ = rho;
}
