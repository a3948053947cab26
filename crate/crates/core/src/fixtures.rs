//! Published triples and tuples, validated on first access.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::io::parse_tuple;
use crate::tuple::Tuple;

const RAW: &[(&str, &[&str])] = &[
    (
        "figure_1",
        &["0123,3210,2301,1032|0123,2301,1032,3210|0123,1032,3210,2301"],
    ),
    (
        "figure_2",
        &["0123456,6542310,3416025,1365204|0123456,5634102,6250314,3012645|0123456,4216035,5601243,6450312"],
    ),
    (
        "figure_6",
        &[
            "01234567,32107654,23016745,10325476|01234567,23016745,10325476,32107654|01234567,10325476,32107654,23016745",
            "01234567,32107654,23015476,10326745|01234567,23016745,10327654,32105476|01234567,10325476,32106745,23017654",
        ],
    ),
    ("example_1", &["01234,43120|01234,34012|01234,20341"]),
    (
        "example_2",
        &["012345,543210,451032,325401,204153|012345,451032,325401,243150,530214|012345,325401,504213,451032,143520"],
    ),
    (
        "appendix_A",
        &["0123,3210,2301,1032|0123,2301,1032,3210|0123,1032,3210,2301"],
    ),
    (
        "appendix_B",
        &["01234,43102,32410,20341,14023|01234,32410,43102,14023,20341|01234,20341,14023,32410,43102"],
    ),
    (
        "appendix_C",
        &[
            "012345,543210,451032,325401,204153|012345,451032,325401,243150,530214|012345,325401,504213,451032,143520",
            "012345,543210,435102,354021,201453|012345,435102,543210,201453,354021|012345,354021,201453,543210,435102",
            "012345,543210,435021,354102,120534|012345,435021,543210,201453,354102|012345,354102,201453,543210,435021",
            "012345,543102,435210,201534,120453|012345,435210,120534,354102,543021|012345,201534,543021,120453,435210",
            "012345,543102,435210,201534,120453|012345,435210,120534,354102,543021|012345,201534,543021,120453,354210",
            "012345,543102,435021,354210,120453|012345,435210,201534,120453,354102|012345,201534,120453,543102,435210",
            "012345,543102,435021,354210,201534|012345,435210,201534,120453,543021|012345,201534,120453,543021,354102",
        ],
    ),
    (
        "appendix_D",
        &[
            "0123456,6542103,5436210,4305621,3014562,2651034,1260345|0123456,5436210,6542103,2651034,1260345,4305621,3014562|0123456,4305621,2651034,3014562,6542103,1260345,5436210",
            "0123456,6542103,5436210,4305621,3014562,2651034,1260345|0123456,5436210,6542103,2651034,1260345,4305621,3014562|0123456,3014562,1260345,6542103,4305621,5436210,2651034",
            "0123456,6542103,5436210,4305621,3014562,2651034,1260345|0123456,4305621,2651034,3014562,6542103,1260345,5436210|0123456,3014562,1260345,6542103,4305621,5436210,2651034",
            "0123456,6542103,5436210,4305621,3014562,2651034,1260345|0123456,4305621,2651034,3014562,6542103,1260345,5436210|0123456,1260345,3014562,5436210,2651034,6542103,4305621",
        ],
    ),
    (
        "appendix_E1",
        &["012345,543210,451032,325401,204153|012345,451032,325401,243150,530214|012345,325401,504213,451032,143520|012345,204153,143520,530214,425031"],
    ),
    (
        "appendix_E2",
        &["0123456,6542103,2651034|0123456,5436210,3014562|0123456,4305621,1260345|0123456,3014562,5436210|0123456,2651034,6542103|0123456,1260345,4305621"],
    ),
    (
        "appendix_E3",
        &["0123456,6542103,5436210,4305621|0123456,5436210,6542103,2651034|0123456,4305621,2651034,3014562|0123456,3014562,1260345,6542103|0123456,2651034,4305621,1260345|0123456,1260345,3014562,5436210"],
    ),
];

/// All fixtures by name. Panics on first use if any line fails validation.
pub fn fixtures() -> &'static BTreeMap<&'static str, Vec<Tuple>> {
    static CELL: OnceLock<BTreeMap<&'static str, Vec<Tuple>>> = OnceLock::new();
    CELL.get_or_init(|| {
        RAW.iter()
            .map(|(name, lines)| {
                let tuples = lines
                    .iter()
                    .enumerate()
                    .map(|(i, line)| {
                        parse_tuple(line)
                            .unwrap_or_else(|e| panic!("fixture {name}[{i}] is corrupt: {e}"))
                    })
                    .collect();
                (*name, tuples)
            })
            .collect()
    })
}

pub fn fixture(name: &str) -> Option<&'static [Tuple]> {
    fixtures().get(name).map(Vec::as_slice)
}
