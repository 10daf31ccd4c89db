"""Built-in lexicon for offline natural-language realization.

Frames are small on purpose: surface diversity is not what the verification
suite measures. Every string here must stay clear of the label-leak word list
enforced by the linter, so do not add frames containing words like
"wrong" or "depends".
"""

from __future__ import annotations

NAMES: tuple[str, ...] = (
    "Avery", "Rowan", "Juniper", "Marlow", "Sage", "Ellis", "Wren", "Darcy",
    "Quill", "Harbor", "Lark", "Sorrel", "Fenn", "Isla", "Orin", "Petra",
    "Callum", "Nadia", "Tomas", "Yuki", "Imogen", "Basil", "Clover", "Anouk",
)

BACKGROUND_FRAMES: tuple[str, ...] = (
    "{name} grew up beside a foggy harbor and now keeps the town's old "
    "lighthouse running, trading stories with fishers at dawn.",
    "{name} tends a hillside orchard inherited from a grandmother, and the "
    "whole village marks its seasons by what {name} brings to market.",
    "{name} runs a small bindery above a bakery, mending maps and ledgers "
    "for captains who still sail by memory.",
    "{name} spent childhood summers cataloguing beetles and now curates the "
    "dusty natural-history room of a provincial museum.",
    "{name} left a city desk job to fix clockwork in a mountain village, "
    "where every household owns at least one stubborn timepiece.",
    "{name} pilots the river ferry between two market towns and knows every "
    "sandbar, heron nest, and gossiping passenger by name.",
    "{name} keeps the weather station on the northern cliffs, logging winds "
    "by hand the way three generations did before.",
    "{name} bakes before sunrise in a shop that doubles as the village's "
    "unofficial news exchange, and naps through every siesta.",
    "{name} apprenticed with a glassblower on the coast and now fills the "
    "studio with lopsided, beloved lanterns.",
    "{name} maps tide pools for the harbor council and writes small field "
    "guides nobody asked for but everybody buys.",
)

# clause pairs: (key, positive clause, negative clause); "{name}" is filled in
PREDICATE_FRAMES: tuple[tuple[str, str, str], ...] = (
    ("tide_journal", "{name} keeps a handwritten tide journal",
     "{name} never keeps a tide journal"),
    ("harbor_bell", "{name} polishes the harbor bell at dawn",
     "{name} leaves the harbor bell untouched"),
    ("orchard_rounds", "{name} walks the orchard rounds before breakfast",
     "{name} skips the orchard rounds entirely"),
    ("lighthouse_lamp", "{name} trims the lighthouse lamp each evening",
     "{name} lets the lighthouse lamp go dark"),
    ("ferry_whistle", "{name} answers the ferry whistle without fail",
     "{name} ignores the ferry whistle"),
    ("map_mending", "{name} mends captains' maps by lamplight",
     "{name} turns away every torn map"),
    ("beetle_catalog", "{name} adds a new beetle to the catalog each week",
     "{name} has abandoned the beetle catalog"),
    ("clock_springs", "{name} hoards spare clock springs in jam jars",
     "{name} owns not a single spare clock spring"),
    ("storm_shutters", "{name} latches the storm shutters early",
     "{name} leaves the storm shutters swinging"),
    ("honey_trade", "{name} trades honey with the upland farms",
     "{name} never trades honey with anyone"),
    ("night_baking", "{name} bakes the first loaves before sunrise",
     "{name} sleeps straight through the baking hour"),
    ("chess_by_post", "{name} plays chess by post with a rival two towns over",
     "{name} gave up chess by post long ago"),
    ("kite_weather", "{name} flies a box kite to read the weather",
     "{name} keeps the box kite packed away"),
    ("choir_bass", "{name} sings bass in the quay-side choir",
     "{name} stays out of the quay-side choir"),
    ("lantern_glass", "{name} blows new glass for the pier lanterns",
     "{name} has stopped blowing lantern glass"),
    ("goat_ledger", "{name} keeps the goat ledger balanced to the last kid",
     "{name} lets the goat ledger drift into chaos"),
    ("rain_barrels", "{name} seals the rain barrels before the equinox",
     "{name} leaves the rain barrels open to the sky"),
    ("fiddle_tunes", "{name} learns a new fiddle tune every market day",
     "{name} has not touched the fiddle in years"),
    ("sea_glass", "{name} collects sea glass for the window boxes",
     "{name} walks past sea glass without a glance"),
    ("pigeon_post", "{name} trusts the pigeon post with urgent news",
     "{name} refuses to use the pigeon post"),
    ("herb_drying", "{name} dries herbs in the bell tower rafters",
     "{name} dries no herbs at all"),
    ("net_knots", "{name} reties the fishing nets with double knots",
     "{name} leaves the fishing nets frayed"),
    ("star_charts", "{name} updates the star charts each clear night",
     "{name} lets the star charts gather dust"),
    ("cider_press", "{name} runs the cider press for the whole lane",
     "{name} keeps the cider press locked up"),
    ("bridge_toll", "{name} waves neighbors past the bridge toll",
     "{name} collects the bridge toll from everyone"),
    ("owl_boxes", "{name} builds owl boxes for the granary eaves",
     "{name} builds no owl boxes"),
    ("salt_pans", "{name} rakes the salt pans at low tide",
     "{name} leaves the salt pans unraked"),
    ("book_repairs", "{name} sews loose spines back into old books",
     "{name} sends damaged books away unrepaired"),
    ("wind_vane", "{name} oils the courthouse wind vane",
     "{name} lets the wind vane squeak"),
    ("mushroom_walks", "{name} leads mushroom walks after autumn rain",
     "{name} cancels every mushroom walk"),
    ("ice_cellar", "{name} stocks the ice cellar by midsummer",
     "{name} leaves the ice cellar empty"),
    ("ribbon_prizes", "{name} wins ribbon prizes at the shearing fair",
     "{name} comes home from the fair without ribbons"),
    ("tea_blends", "{name} mixes tea blends for the ferry crews",
     "{name} mixes no tea for anyone"),
    ("quarry_path", "{name} clears the quarry path after rockfalls",
     "{name} leaves the quarry path blocked"),
    ("swallow_census", "{name} counts the swallows under the eaves each spring",
     "{name} skips the swallow census"),
    ("anchor_paint", "{name} repaints the memorial anchor every year",
     "{name} lets the memorial anchor rust"),
    ("bee_smoker", "{name} calms the hives with a cedar smoker",
     "{name} never goes near the hives"),
    ("flour_mill", "{name} grinds flour at the old water mill",
     "{name} buys flour from the city instead"),
    ("postcard_wall", "{name} pins every received postcard to the shop wall",
     "{name} throws postcards straight into a drawer"),
    ("canal_skating", "{name} skates the frozen canal in winter",
     "{name} stays off the canal ice"),
)

# rule phrasings per template; slots {a}, {b}, {c} take positive clauses
RULE_FRAMES: dict[str, tuple[str, ...]] = {
    "impl": (
        "if {a}, then {b}",
        "when {a}, {b} follows",
        "{a} means that {b}",
        "whenever {a}, it also holds that {b}",
        "should {a}, then {b}",
        "{a} guarantees that {b}",
        "once {a}, {b} as well",
        "{a} is enough for {b}",
        "{a} never happens without {b}",
        "{a} always comes with {b}",
        "as soon as {a}, {b} too",
        "{a} brings it about that {b}",
    ),
    "and_ante": (
        "if both {a} and {b}, then {c}",
        "when {a} and also {b}, {c} follows",
        "{a} together with {b} means that {c}",
        "whenever {a} and {b} hold at once, so does {c}",
        "should {a} and {b} both happen, {c} happens",
        "{a} combined with {b} guarantees that {c}",
        "if {a} while {b}, then {c}",
        "{a} and {b} jointly bring it about that {c}",
        "once {a} and {b}, also {c}",
        "with {a} and {b} together, it is certain that {c}",
        "{a} alongside {b} is enough for {c}",
        "there is no case where {a} and {b} hold yet {c} fails",
    ),
    "and_cons": (
        "if {a}, then both {b} and {c}",
        "when {a}, {b} and {c} follow together",
        "{a} means that {b} and that {c}",
        "whenever {a}, both {b} and {c} hold",
        "should {a}, then {b} along with {c}",
        "{a} guarantees both that {b} and that {c}",
        "once {a}, {b} and {c} as well",
        "{a} brings it about that {b} and that {c}",
        "{a} is enough for both {b} and {c}",
        "with {a}, it is certain that {b} and that {c}",
        "{a} always comes with {b} and with {c}",
        "there is no {a} without both {b} and {c}",
    ),
    "or_ante": (
        "if {a} or {b}, then {c}",
        "when at least one of {a} or {b} holds, {c} follows",
        "either {a} or {b} is enough for {c}",
        "whenever {a} or {b}, also {c}",
        "should {a} or {b} hold, {c} holds",
        "{a} or {b} guarantees that {c}",
        "one of {a} or {b} suffices for {c}",
        "if any of {a} or {b} happens, {c} happens",
        "once {a} or {b}, {c} as well",
        "{a}, or alternatively {b}, brings it about that {c}",
        "with {a} or {b}, it is certain that {c}",
        "there is no case where {a} or {b} holds yet {c} fails",
    ),
    "or_cons": (
        "if {a}, then {b} or {c}",
        "when {a}, at least one of {b} or {c} holds",
        "{a} means that {b} or that {c}",
        "whenever {a}, one of {b} or {c} follows",
        "should {a}, either {b} or {c} holds",
        "{a} guarantees that {b} or else that {c}",
        "once {a}, {b} or {c} as well",
        "{a} forces at least one of {b} or {c}",
        "with {a}, it is certain that {b} or that {c}",
        "{a} is enough for {b} or for {c}",
        "given {a}, at least one of {b} or {c} holds",
        "there is no {a} without {b} or without {c}",
    ),
    "xor_ante": (
        "if exactly one of {a} and {b} holds, then {c}",
        "when {a} and {b} part ways, {c} follows",
        "one but not both of {a} and {b} means that {c}",
        "whenever precisely one of {a} or {b} holds, so does {c}",
        "should {a} and {b} disagree, {c} holds",
        "a split between {a} and {b} guarantees that {c}",
        "if {a} and {b} differ, then {c}",
        "exactly one of {a} or {b} brings it about that {c}",
        "once {a} and {b} diverge, {c} as well",
        "with {a} and {b} in disagreement, it is certain that {c}",
        "an odd one out among {a} and {b} is enough for {c}",
        "there is no case where just one of {a} and {b} holds yet {c} fails",
    ),
    "xor_bare": (
        "exactly one of the following holds: {a}, or {b}",
        "either {a} or {b}, but never both",
        "one of {a} and {b} is true, and not the other",
        "precisely one of {a} and {b} is the case",
        "{a} and {b} cannot both hold, yet one of them must",
        "it is one or the other: {a}, or {b}",
        "just one of {a} and {b} holds",
        "between {a} and {b}, exactly one is so",
        "{a} and {b} split the truth: one holds, one does not",
        "one and only one of {a} and {b} holds",
        "either {a}, or {b}, and never both at once",
        "a single one of {a} and {b} is true",
    ),
}

# step composition; {facts} and {why} take clauses, {concl} the conclusion clause
STEP_FRAMES: tuple[str, ...] = (
    "Given that {facts}, and since {why}, {concl}.",
    "Because {facts}, and knowing that {why}, {concl}.",
    "Note that {facts}; as {why}, it follows that {concl}.",
    "From the fact that {facts}, and because {why}, {concl}.",
    "Taking together that {facts}, and since {why}, {concl}.",
    "Here {facts}; because {why}, {concl}.",
    "Consider that {facts}. Since {why}, {concl}.",
    "Now {facts}, and as {why}, {concl}.",
)

GOAL_FRAMES: tuple[str, ...] = (
    "Decide whether the following is so: {concl}.",
    "The question is whether {concl}.",
    "Work out whether {concl}.",
    "At issue is whether {concl}.",
)
