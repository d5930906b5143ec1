//! Built-in example actions, written by `solvquot examples`.

pub const WEITZENBOECK: &str = "\
# Weitzenboeck action of the additive group on Q[x, y, w]
field Q
vars x y w
unipotent z1
map x = x + y*z1
map y = y
map w = w + x*z1 + (1/2)*y*z1^2
";

pub const CHAR_P: &str = "\
# in characteristic 2 the slice x has degree 2
field Fp 2
vars x y
unipotent z1
map x = x + y*z1 + z1^2
map y = y
";

pub const SHEAR: &str = "\
field Q
vars x1 x2
unipotent z1
map x1 = x1 + x2*z1
map x2 = x2
";

pub const SCALING: &str = "\
field Q
vars x1 x2
torus t1
map x1 = t1*x1
map x2 = t1*x2
";

pub const GAGM: &str = "\
# additive group times a torus on Q[x, y, u]
field Q
vars x y u
unipotent z1
torus t1
char z1 = 1
map x = t1*x + t1*y*z1
map y = t1*y
map u = u
";

pub const AFFINE: &str = "\
# the group of maps a*v + b acting diagonally on Q[x, y]
field Q
vars x y
unipotent z1
torus t1
char z1 = t1
map x = t1*x + z1
map y = t1*y + z1
";

/// `(file name, contents)` for every example.
pub const EXAMPLES: &[(&str, &str)] = &[
    ("weitzenboeck.sq", WEITZENBOECK),
    ("charp.sq", CHAR_P),
    ("shear.sq", SHEAR),
    ("scaling.sq", SCALING),
    ("gagm.sq", GAGM),
    ("affine.sq", AFFINE),
];

/// `x -> x + y z + z^p`, `y -> y` over `F_p`.
pub fn char_p(p: u64) -> String {
    format!("field Fp {p}\nvars x y\nunipotent z1\nmap x = x + y*z1 + z1^{p}\nmap y = y\n")
}
