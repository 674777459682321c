//! Shared inputs for unit tests.

/// A molecule shuttling between the top level and a cell: the cell admits it,
/// hands it the name of a third channel, and the molecule then expels its cargo
/// ambient D through that channel.
pub(crate) const CELL_MOL: &str = "(c)(cell1)(cell2)(cell3) [rec X. (enter cell1. X + exit cell2. X + c?^{x}. expel x. X) | [exit cell3. 0]^D]^mol | [rec X. (accept cell1. X + expel cell2. X + c!v{cell3}. X)]^cell";

/// Two ambients, one handshake: `a` moves into `b`.
pub(crate) const ENTER_PAIR: &str = "[enter n. 0]^a | [accept n. 0]^b";

pub(crate) fn parse_ok(src: &str) -> crate::ast::Process {
    match crate::parser::parse(src) {
        Ok(p) => p,
        Err(e) => panic!("parse failed on {src:?}: {e}"),
    }
}
