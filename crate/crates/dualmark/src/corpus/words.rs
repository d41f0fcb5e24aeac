//! Static word bank behind the bundled vocabulary, lexicon, and document
//! templates.
//!
//! Words are organized as groups of four interchangeable members; a
//! group doubles as the synonym set for the paraphrase attack, so every
//! member of a group must carry the same polarity. Nouns expand to
//! singular and plural surface forms, verbs to base, third-person,
//! past, and gerund forms; the groups below only list base words that
//! inflect cleanly under the regular spelling rules in the parent
//! module (no consonant doubling, no irregulars).

/// Closed-class words used literally by the sentence templates. These
/// never get synonyms, so paraphrasing leaves them untouched.
pub(super) const FUNCTION_WORDS: &[&str] = &[
    "the", "a", "an", "of", "to", "and", "in", "on", "at", "with", "for", "from", "by", "as",
    "that", "this", "these", "those", "it", "was", "were", "is", "are", "be", "been", "has",
    "had", "have", "will", "would", "near", "while", "because", "every", "some", "one", "two",
    "his", "her", "their", "its", "but", "then", "when", "where", "both", "most", "more",
    "very", "also", "into", "over", "under", "after", "before", "during", "against", "without",
    "within", "about", "through", "between",
];

pub(super) const NOUN_GROUPS: &[[&str; 4]] = &[
    ["river", "stream", "creek", "brook"],
    ["mountain", "hill", "ridge", "peak"],
    ["forest", "wood", "grove", "thicket"],
    ["meadow", "field", "pasture", "prairie"],
    ["village", "town", "hamlet", "borough"],
    ["road", "street", "avenue", "lane"],
    ["path", "trail", "track", "route"],
    ["house", "home", "cottage", "cabin"],
    ["hut", "shed", "shack", "barn"],
    ["castle", "palace", "fortress", "citadel"],
    ["tower", "spire", "turret", "steeple"],
    ["harbor", "port", "dock", "wharf"],
    ["ship", "boat", "vessel", "ferry"],
    ["ocean", "sea", "gulf", "bay"],
    ["lake", "pond", "lagoon", "reservoir"],
    ["island", "isle", "atoll", "peninsula"],
    ["valley", "canyon", "gorge", "ravine"],
    ["cliff", "bluff", "crag", "ledge"],
    ["stone", "rock", "boulder", "pebble"],
    ["garden", "orchard", "vineyard", "nursery"],
    ["tree", "oak", "maple", "birch"],
    ["flower", "blossom", "bloom", "petal"],
    ["grass", "moss", "fern", "reed"],
    ["seed", "bulb", "sapling", "shoot"],
    ["branch", "twig", "bark", "frond"],
    ["root", "stem", "stalk", "trunk"],
    ["farm", "ranch", "homestead", "farmstead"],
    ["crop", "harvest", "yield", "produce"],
    ["wheat", "barley", "oat", "rye"],
    ["apple", "pear", "plum", "peach"],
    ["berry", "grape", "cherry", "currant"],
    ["bread", "roll", "bun", "biscuit"],
    ["milk", "tea", "coffee", "juice"],
    ["meal", "supper", "dinner", "breakfast"],
    ["kitchen", "pantry", "cellar", "attic"],
    ["table", "desk", "bench", "counter"],
    ["chair", "stool", "seat", "sofa"],
    ["bed", "cot", "bunk", "cradle"],
    ["door", "gate", "hatch", "portal"],
    ["window", "pane", "shutter", "sill"],
    ["wall", "fence", "hedge", "railing"],
    ["floor", "tile", "plank", "board"],
    ["room", "hall", "chamber", "parlor"],
    ["stair", "stairway", "ladder", "ramp"],
    ["lamp", "lantern", "candle", "torch"],
    ["fire", "flame", "ember", "spark"],
    ["water", "rain", "dew", "mist"],
    ["cloud", "fog", "haze", "vapor"],
    ["storm", "thunder", "lightning", "gale"],
    ["wind", "breeze", "gust", "draft"],
    ["snow", "frost", "sleet", "hail"],
    ["sun", "moon", "star", "comet"],
    ["dawn", "sunrise", "sunset", "twilight"],
    ["morning", "noon", "evening", "midnight"],
    ["day", "week", "month", "season"],
    ["hour", "minute", "moment", "instant"],
    ["bell", "chime", "gong", "horn"],
    ["music", "melody", "tune", "rhythm"],
    ["song", "ballad", "hymn", "anthem"],
    ["story", "tale", "legend", "fable"],
    ["book", "volume", "tome", "booklet"],
    ["page", "chapter", "verse", "paragraph"],
    ["letter", "note", "message", "memo"],
    ["word", "phrase", "sentence", "clause"],
    ["pen", "pencil", "quill", "stylus"],
    ["picture", "portrait", "sketch", "mural"],
    ["school", "academy", "college", "institute"],
    ["lesson", "lecture", "seminar", "tutorial"],
    ["teacher", "tutor", "mentor", "instructor"],
    ["student", "scholar", "apprentice", "learner"],
    ["doctor", "nurse", "surgeon", "healer"],
    ["farmer", "shepherd", "plowman", "herdsman"],
    ["baker", "butcher", "grocer", "chef"],
    ["merchant", "trader", "vendor", "peddler"],
    ["sailor", "captain", "navigator", "helmsman"],
    ["soldier", "guard", "sentry", "warden"],
    ["neighbor", "companion", "ally", "acquaintance"],
    ["family", "household", "clan", "tribe"],
    ["mother", "father", "parent", "guardian"],
    ["brother", "sister", "cousin", "sibling"],
    ["infant", "toddler", "youngster", "lad"],
    ["person", "citizen", "resident", "inhabitant"],
    ["crowd", "throng", "assembly", "audience"],
    ["market", "bazaar", "fair", "emporium"],
    ["shop", "store", "stall", "boutique"],
    ["money", "cash", "currency", "treasure"],
    ["tool", "implement", "utensil", "gadget"],
    ["hammer", "mallet", "chisel", "wrench"],
    ["blade", "dagger", "scythe", "cleaver"],
    ["rope", "cord", "twine", "cable"],
    ["cart", "wagon", "carriage", "chariot"],
    ["horse", "pony", "mare", "stallion"],
    ["dog", "hound", "pup", "terrier"],
    ["cat", "kitten", "tabby", "tomcat"],
    ["bird", "sparrow", "finch", "wren"],
    ["hawk", "eagle", "falcon", "owl"],
    ["duck", "swan", "heron", "crane"],
    ["fish", "trout", "salmon", "minnow"],
    ["rat", "squirrel", "rabbit", "hare"],
    ["bear", "lion", "tiger", "leopard"],
    ["hand", "finger", "thumb", "palm"],
    ["head", "forehead", "chin", "cheek"],
    ["ear", "nose", "mouth", "tongue"],
    ["voice", "whisper", "murmur", "hum"],
    ["coat", "cloak", "jacket", "tunic"],
    ["shoe", "boot", "sandal", "slipper"],
    ["hat", "cap", "hood", "bonnet"],
    ["basket", "bucket", "pail", "tub"],
    ["bottle", "jar", "flask", "jug"],
    ["cup", "mug", "goblet", "tankard"],
    ["plate", "bowl", "dish", "platter"],
    ["pot", "pan", "kettle", "cauldron"],
    ["box", "crate", "chest", "carton"],
    ["bag", "sack", "pouch", "satchel"],
    ["map", "chart", "atlas", "globe"],
    ["anchor", "mast", "sail", "rudder"],
    ["well", "spring", "fountain", "geyser"],
    ["cave", "den", "burrow", "lair"],
    ["nest", "hive", "roost", "perch"],
    ["salt", "pepper", "spice", "herb"],
    ["cloth", "fabric", "linen", "wool"],
    ["glass", "mirror", "lens", "prism"],
    ["report", "notice", "bulletin", "gazette"],
    ["nation", "country", "kingdom", "realm"],
    ["game", "sport", "contest", "tournament"],
    ["prize", "medal", "trophy", "ribbon"],
    ["team", "squad", "roster", "lineup"],
    ["journey", "voyage", "trek", "expedition"],
    ["visitor", "traveler", "pilgrim", "wanderer"],
    ["guest", "host", "tenant", "lodger"],
    ["inn", "tavern", "lodge", "hostel"],
    ["stable", "paddock", "corral", "kennel"],
    ["engine", "motor", "turbine", "piston"],
    ["machine", "device", "apparatus", "contraption"],
    ["switch", "handle", "crank", "knob"],
    ["pipe", "valve", "nozzle", "spout"],
    ["wire", "coil", "magnet", "battery"],
    ["signal", "beacon", "flare", "siren"],
    ["number", "figure", "digit", "numeral"],
    ["sum", "total", "amount", "quantity"],
    ["shape", "circle", "square", "triangle"],
    ["line", "curve", "angle", "arc"],
    ["weight", "mass", "load", "burden"],
    ["length", "width", "height", "depth"],
    ["third", "quarter", "fraction", "ratio"],
    ["piece", "slice", "chunk", "sliver"],
    ["group", "cluster", "batch", "bundle"],
    ["list", "queue", "stack", "array"],
    ["corner", "edge", "rim", "brim"],
    ["middle", "center", "core", "hub"],
    ["top", "summit", "crest", "apex"],
    ["bottom", "base", "foundation", "bedrock"],
    ["side", "flank", "verge", "fringe"],
    ["front", "rear", "forefront", "vanguard"],
];

pub(super) const VERB_GROUPS: &[[&str; 4]] = &[
    ["walk", "stroll", "march", "wander"],
    ["hurry", "rush", "dash", "scurry"],
    ["jump", "leap", "vault", "bound"],
    ["climb", "ascend", "clamber", "scramble"],
    ["descend", "tumble", "plunge", "drift"],
    ["carry", "haul", "tote", "convey"],
    ["lift", "raise", "hoist", "elevate"],
    ["push", "shove", "press", "nudge"],
    ["pull", "yank", "heave", "jerk"],
    ["open", "close", "seal", "fasten"],
    ["start", "commence", "initiate", "launch"],
    ["finish", "conclude", "cease", "halt"],
    ["look", "gaze", "glance", "peer"],
    ["watch", "observe", "examine", "inspect"],
    ["listen", "hearken", "heed", "attend"],
    ["talk", "converse", "discuss", "mention"],
    ["state", "declare", "announce", "proclaim"],
    ["ask", "inquire", "request", "query"],
    ["answer", "reply", "respond", "retort"],
    ["call", "summon", "beckon", "invite"],
    ["help", "assist", "aid", "support"],
    ["work", "labor", "toil", "persevere"],
    ["construct", "assemble", "erect", "fabricate"],
    ["crack", "shatter", "smash", "fracture"],
    ["repair", "mend", "restore", "patch"],
    ["clean", "wash", "rinse", "wipe"],
    ["cook", "bake", "roast", "simmer"],
    ["devour", "consume", "nibble", "munch"],
    ["gulp", "swallow", "quaff", "slurp"],
    ["ripen", "mature", "mellow", "develop"],
    ["plant", "cultivate", "irrigate", "fertilize"],
    ["reap", "mow", "prune", "thresh"],
    ["gather", "collect", "amass", "accumulate"],
    ["offer", "donate", "grant", "bestow"],
    ["seize", "snatch", "pluck", "claim"],
    ["grasp", "clutch", "clench", "grapple"],
    ["toss", "hurl", "catapult", "pitch"],
    ["fetch", "retrieve", "recover", "reclaim"],
    ["search", "explore", "probe", "scour"],
    ["conceal", "mask", "veil", "shroud"],
    ["display", "reveal", "present", "exhibit"],
    ["turn", "rotate", "swivel", "twirl"],
    ["move", "shift", "relocate", "migrate"],
    ["stay", "remain", "linger", "dwell"],
    ["depart", "exit", "vacate", "retreat"],
    ["arrive", "enter", "approach", "reach"],
    ["follow", "pursue", "accompany", "escort"],
    ["deliver", "dispatch", "forward", "mail"],
    ["scribble", "compose", "transcribe", "inscribe"],
    ["recite", "narrate", "quote", "summarize"],
    ["count", "measure", "weigh", "estimate"],
    ["ponder", "muse", "reflect", "contemplate"],
    ["learn", "study", "memorize", "master"],
    ["instruct", "educate", "train", "coach"],
    ["try", "attempt", "endeavor", "venture"],
    ["want", "wish", "desire", "crave"],
    ["need", "require", "demand", "lack"],
    ["play", "romp", "caper", "frisk"],
    ["rest", "relax", "pause", "recline"],
    ["travel", "roam", "rove", "ramble"],
];

pub(super) const ADJ_GROUPS: &[[&str; 4]] = &[
    ["small", "little", "tiny", "miniature"],
    ["big", "large", "huge", "enormous"],
    ["tall", "high", "lofty", "steep"],
    ["short", "low", "squat", "stubby"],
    ["wide", "broad", "vast", "spacious"],
    ["narrow", "slim", "slender", "lean"],
    ["old", "ancient", "elderly", "antique"],
    ["new", "modern", "recent", "fresh"],
    ["young", "youthful", "juvenile", "adolescent"],
    ["fast", "quick", "rapid", "swift"],
    ["slow", "sluggish", "gradual", "leisurely"],
    ["heavy", "dense", "weighty", "solid"],
    ["light", "airy", "feathery", "buoyant"],
    ["hot", "warm", "balmy", "tropical"],
    ["cold", "cool", "chilly", "frigid"],
    ["wet", "damp", "moist", "soggy"],
    ["dry", "arid", "parched", "dusty"],
    ["round", "circular", "spherical", "oval"],
    ["flat", "level", "smooth", "sleek"],
    ["rough", "coarse", "jagged", "rugged"],
    ["soft", "tender", "supple", "plush"],
    ["hard", "firm", "rigid", "stiff"],
    ["bright", "shiny", "luminous", "glossy"],
    ["dark", "dim", "shadowy", "murky"],
    ["loud", "noisy", "thunderous", "deafening"],
    ["quiet", "silent", "hushed", "muted"],
    ["clear", "transparent", "crystalline", "lucid"],
    ["cloudy", "misty", "foggy", "hazy"],
    ["busy", "crowded", "bustling", "hectic"],
    ["deep", "profound", "bottomless", "cavernous"],
    ["shallow", "skimpy", "scant", "meager"],
    ["full", "laden", "replete", "teeming"],
    ["common", "ordinary", "typical", "usual"],
    ["rare", "scarce", "uncommon", "unusual"],
    ["simple", "plain", "basic", "modest"],
    ["complex", "intricate", "elaborate", "ornate"],
    ["local", "nearby", "adjacent", "neighboring"],
    ["distant", "remote", "faraway", "outlying"],
    ["early", "initial", "preliminary", "prior"],
    ["late", "final", "last", "ultimate"],
    ["whole", "entire", "complete", "intact"],
    ["thick", "chunky", "stout", "bulky"],
    ["gray", "brown", "beige", "tan"],
    ["red", "crimson", "scarlet", "ruby"],
    ["blue", "azure", "indigo", "sapphire"],
    ["green", "emerald", "olive", "jade"],
    ["yellow", "golden", "amber", "saffron"],
    ["white", "ivory", "snowy", "pale"],
    ["black", "ebony", "charcoal", "inky"],
    ["wooden", "oaken", "timbered", "rustic"],
    ["woolen", "silken", "velvety", "satin"],
    ["stony", "rocky", "pebbly", "sandy"],
];

pub(super) const ADV_GROUPS: &[[&str; 4]] = &[
    ["slowly", "gradually", "steadily", "gently"],
    ["quickly", "swiftly", "rapidly", "briskly"],
    ["quietly", "softly", "silently", "calmly"],
    ["loudly", "noisily", "boldly", "firmly"],
    ["carefully", "cautiously", "deliberately", "precisely"],
    ["often", "frequently", "regularly", "repeatedly"],
    ["rarely", "seldom", "occasionally", "sometimes"],
    ["always", "constantly", "continually", "forever"],
    ["soon", "shortly", "presently", "eventually"],
    ["today", "tomorrow", "yesterday", "tonight"],
    ["here", "there", "everywhere", "somewhere"],
    ["outside", "inside", "upstairs", "downstairs"],
    ["together", "apart", "alone", "aside"],
    ["somewhat", "slightly", "partly", "mostly"],
    ["really", "truly", "surely", "certainly"],
    ["once", "twice", "anew", "afresh"],
];

pub(super) const POSITIVE_ADJ_GROUPS: &[[&str; 4]] = &[
    ["good", "great", "fine", "decent"],
    ["happy", "cheerful", "joyful", "merry"],
    ["kind", "gentle", "caring", "benevolent"],
    ["brave", "bold", "courageous", "valiant"],
    ["wise", "clever", "smart", "brilliant"],
    ["calm", "peaceful", "tranquil", "serene"],
];

pub(super) const POSITIVE_NOUN_GROUPS: &[[&str; 4]] = &[
    ["joy", "delight", "bliss", "cheer"],
    ["hope", "optimism", "confidence", "faith"],
    ["gift", "blessing", "bounty", "reward"],
];

pub(super) const POSITIVE_VERB_GROUPS: &[[&str; 4]] = &[
    ["praise", "applaud", "compliment", "congratulate"],
    ["smile", "beam", "rejoice", "celebrate"],
    ["succeed", "prosper", "flourish", "thrive"],
];

pub(super) const NEGATIVE_ADJ_GROUPS: &[[&str; 4]] = &[
    ["bad", "poor", "awful", "terrible"],
    ["evil", "wicked", "vile", "sinister"],
    ["cruel", "brutal", "savage", "ruthless"],
    ["angry", "furious", "irate", "enraged"],
    ["dangerous", "perilous", "hazardous", "treacherous"],
    ["grim", "bleak", "dreary", "desolate"],
];

pub(super) const NEGATIVE_NOUN_GROUPS: &[[&str; 4]] = &[
    ["sorrow", "grief", "misery", "despair"],
    ["fear", "dread", "terror", "panic"],
    ["danger", "threat", "menace", "peril"],
];

pub(super) const NEGATIVE_VERB_GROUPS: &[[&str; 4]] = &[
    ["harm", "injure", "wound", "maim"],
    ["threaten", "intimidate", "bully", "harass"],
    ["destroy", "wreck", "demolish", "devastate"],
];

/// Sentence skeletons. Tokens starting with `%` are slots: `%ns`/`%np`
/// singular/plural neutral noun, `%v` neutral verb (past), `%a` neutral
/// adjective, `%d` adverb, and `%pa`/`%pn`/`%pv` the polarity-bearing
/// adjective/noun/verb slots filled from the document's own class.
/// Every skeleton carries at least one polarity slot so each sentence
/// contributes to the document label.
pub(super) const SENTENCE_TEMPLATES: &[&str] = &[
    "the %pa %ns %pv the %pa %np and the %pa %ns %v with %pn",
    "a %pa %ns of %pn %pv the %a %np %d",
    "the %ns %pv a %pa %pn while the %pa %np %pv %d",
    "every %pa %ns near the %np %pv the %pa %pn %d",
    "the %pn of the %pa %ns %pv the %np and %pv a %pa %pn",
    "some %pa %np %pv the %pa %pn and the %pa %ns %pv %d",
    "the %pa %ns %pv a %pn and every %pa %np %v the %pn",
    "that %pa %ns %v %d because the %pa %np %pv the %pn",
    "the %np from the %pa %ns %pv a %pa %pn %d",
    "one %pa %ns %pv the %pn while a %pa %np %v near the %pn",
    "the %pa %np %pv and the %a %ns %pv a %pa %pn",
    "his %pa %ns %pv the %pa %np and her %pa %ns %pv %d",
    "their %pa %ns %pv a %pn and this %pa %ns %v the %pn",
    "the %pa %ns %pv %d and the %pa %np %pv the %a %pn",
];
