//! Fixture corpus compiled into the binary. The first comment line of each
//! file is its provenance.

use crate::formats::Format;

#[derive(Clone, Copy, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub text: &'static str,
}

impl Fixture {
    pub fn format(&self) -> Format {
        Format::from_path(self.name).expect("fixture names carry a known extension")
    }

    pub fn provenance(&self) -> &'static str {
        self.text
            .lines()
            .find_map(|l| l.strip_prefix('#'))
            .map_or("", str::trim)
    }
}

macro_rules! corpus {
    ($($name:literal),* $(,)?) => {
        &[$(Fixture { name: $name, text: include_str!(concat!("../fixtures/", $name)) }),*]
    };
}

pub const FIXTURES: &[Fixture] = corpus![
    "annulus.cx2",
    "baumslag_solitar_12.gog",
    "collapsible_chain.gog",
    "dihedral_arc.gog",
    "filtration_path.gog",
    "four_lines.pat",
    "hexagon_disk.cx2",
    "hexagon_ring.npat",
    "mapping_torus_circle.gog",
    "point.gog",
    "theta_bushy.gog",
    "trivalent_ball_3.tree",
    "x_axis.pts",
    "z2_line_raft.gog",
    "z2_two_axes.gog",
    "z2_x_axis.gog",
    "z3_lines_only.gog",
    "z3_plane_and_crosser.gog",
    "z3_plane_and_inner_line.gog",
    "z3_single_plane.gog",
    "z3_skew_planes.gog",
    "z3_three_planes.gog",
    "z3_two_planes.gog",
    "z3_z3.gog",
    "zp_ball_2.tree",
    "zp_zp.gog",
];

pub fn get(name: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.name == name || f.name.rsplit_once('.').is_some_and(|(stem, _)| stem == name))
}

pub fn of_format(format: Format) -> impl Iterator<Item = &'static Fixture> {
    FIXTURES.iter().filter(move |f| f.format() == format)
}
