use nisforge_core::contact::*;
use nisforge_core::scalar::Field;

fn main() {
    let f9 = Field::gf(3, 2);
    for v in f9.elements() {
        if f9.is_zero(&v) { continue; }
        let l22 = build_l22(&f9, &v).unwrap();
        for gen in 1..=2usize {
            let x = l22.base.index_of(&format!("x{gen}")).unwrap();
            let y = l22.base.index_of(&format!("y{gen}")).unwrap();
            let br = l22.base.bracket_basis(x, y);
            let pretty: Vec<String> = br.iter().map(|(k, c)| format!("{}*{}", f9.format(c), l22.base.basis[*k].name)).collect();
            if br.len() != 1 {
                println!("eps = {}: [x{gen},y{gen}] = {:?}", f9.format(&v), pretty);
            }
        }
    }
}
