//! Word pools for synthetic text. Pools are disjoint except where noted so
//! that each kind of document carries a recognisable lexical signature.

pub(crate) struct Topic {
    pub name: &'static str,
    pub words: &'static [&'static str],
}

pub(crate) const TOPICS: &[Topic] = &[
    Topic {
        name: "housing",
        words: &["housing", "affordable", "tenants", "rent", "eviction", "units", "landlords", "shelter", "homeless", "apartments", "residential", "zoning"],
    },
    Topic {
        name: "transit",
        words: &["transit", "muni", "buses", "scooters", "bicycle", "parking", "traffic", "streets", "sidewalks", "caltrain", "lanes", "vehicles"],
    },
    Topic {
        name: "health",
        words: &["health", "covid", "clinic", "vaccine", "hospital", "medical", "patients", "pandemic", "testing", "nurses", "emergency", "outbreak"],
    },
    Topic {
        name: "cannabis",
        words: &["cannabis", "dispensary", "retailers", "licenses", "storefront", "marijuana", "cultivation", "dispensaries", "equity", "smoking", "lounges", "delivery"],
    },
    Topic {
        name: "environment",
        words: &["solar", "climate", "emissions", "trees", "energy", "recycling", "pollution", "electric", "renewable", "watershed", "composting", "wildfire"],
    },
    Topic {
        name: "finance",
        words: &["budget", "bonds", "revenue", "taxes", "deficit", "spending", "audit", "pension", "debt", "fiscal", "surplus", "payroll"],
    },
    Topic {
        name: "safety",
        words: &["police", "firefighters", "crime", "officers", "sheriff", "jail", "violence", "patrol", "enforcement", "firearms", "arrests", "dispatch"],
    },
    Topic {
        name: "parks",
        words: &["parks", "recreation", "library", "playground", "museum", "gardens", "pools", "trails", "stadium", "plaza", "libraries", "fields"],
    },
];

pub(crate) const POLICY_KINDS: &[&str] = &["Ordinance", "Resolution", "Hearing", "Motion", "Appropriation"];

pub(crate) const POLICY_BOILERPLATE: &[&str] = &[
    "amending", "code", "authorizing", "department", "accept", "expend", "establish", "program", "require",
    "administrative", "section", "approving", "agreement", "provisions", "pursuant", "applicable", "findings",
    "determination", "implementation", "designating", "adopting", "effective",
];

pub(crate) const GENERIC_NEWS: &[&str] = &[
    "the", "a", "and", "of", "to", "in", "said", "on", "for", "with", "was", "is", "that", "it", "as", "at",
    "by", "this", "from", "year", "new", "people", "week", "told", "according", "after", "more", "have", "about",
    "their", "some", "many", "also", "last", "when", "would", "could", "while", "they", "into",
];

/// Institutional vocabulary of the governing board.
pub(crate) const BOARD_CONTEXT: &[&str] = &[
    "supervisor", "supervisors", "clerk", "committee", "district", "legislators", "chambers", "hall",
    "president", "colleagues", "lawmakers", "agenda",
];

pub(crate) const VOTE_WORDS: &[&str] = &[
    "voted", "approved", "legislation", "unanimously", "passed", "measure", "vote", "adopted", "ballot",
    "proposal", "amendment", "rejected",
];

pub(crate) const CHATTER_WORDS: &[&str] = &[
    "campaign", "fundraiser", "endorsement", "profile", "career", "interview", "race", "candidate", "donors",
    "rivalry", "personality", "memoir",
];

pub(crate) const LIFESTYLE_WORDS: &[&str] = &[
    "neighborhood", "residents", "weekend", "cafe", "families", "visitors", "shop", "owners", "locals",
    "brunch", "tourists", "community",
];

pub(crate) const FILLER_TOPICS: &[&[&str]] = &[
    &["giants", "warriors", "inning", "playoffs", "coach", "season", "quarterback", "roster", "championship", "fans"],
    &["restaurant", "chef", "menu", "wine", "dining", "bakery", "dishes", "flavors", "kitchen", "tasting"],
    &["concert", "album", "festival", "theater", "gallery", "artist", "premiere", "film", "band", "exhibit"],
    &["rain", "forecast", "storm", "fog", "temperatures", "heat", "showers", "winds", "drought", "weather"],
    &["startup", "investors", "shares", "earnings", "tech", "founders", "valuation", "layoffs", "market", "ipo"],
];

pub(crate) const OTHER_BODIES: &[&str] = &[
    "San Mateo County Board of Supervisors",
    "Marin County Board of Supervisors",
    "Alameda County Board of Supervisors",
    "Santa Clara County Board of Supervisors",
];

/// Deliberation speech used for policy discussion at meetings.
pub(crate) const DELIBERATION: &[&str] = &[
    "think", "know", "want", "people", "need", "colleagues", "support", "really", "important", "concerns",
    "community", "work", "thank", "question", "department", "believe", "important", "years", "forward",
];

pub(crate) const COMMENT_OFFTOPIC: &[&str] = &[
    "noise", "neighbors", "garbage", "potholes", "dogs", "corruption", "taxpayers", "complaint", "bureaucrats",
    "landlord", "towing", "billing", "graffiti", "respect", "listen", "ignored",
];

pub(crate) const COMMENT_OPENERS: &[&str] = &[
    "Good afternoon supervisors my name is",
    "Hello my name is",
    "Hi I am",
    "Good day supervisors I am",
];

pub(crate) const PERSON_NAMES: &[&str] = &[
    "Robert", "Maria", "Aubrey", "Christina", "Peter", "Linda", "James", "Sofia", "Daniel", "Grace", "Victor",
    "Helen", "Omar", "Rosa", "Tom", "Mei",
];

/// Transition templates modelled on how a chair moves between items.
/// `{n}` is the agenda item number.
pub(crate) const ITEM_TRANSITIONS: &[&str] = &[
    "Madam Clerk, please call item {n}.",
    "Without objection, this resolution is adopted unanimously. Item number {n}. Item {n}.",
    "Those items are adopted unanimously. Next item, please.",
    "Item number {n}. Item {n}.",
    "Without objection the resolution is adopted unanimously. Item {n}.",
    "Next item. Item {n}.",
    "Without objection, the resolution is adopted unanimously. Next item. Item {n}.",
    "Madam Clerk, would you call item {n} please?",
    "Without objection, this ordinance is finally passed unanimously. Madam Clerk, item number {n}.",
    "Madam Clerk, please call the next item.",
];

pub(crate) fn section_transition(header: &str) -> &'static str {
    match header {
        "ROLL CALL" => "Madam Clerk, please call the roll.",
        "APPROVAL OF MEETING MINUTE" => "Madam Clerk, next item please, the approval of the meeting minutes.",
        "CONSENT AGENDA" => "Madam Clerk, please call the consent agenda items.",
        "REGULAR AGENDA" => "Madam Clerk, please call the next item on the regular agenda.",
        "PUBLIC COMMENT" => "Madam Clerk, please call the item for general public comment.",
        "FOR ADOPTION WITHOUT COMMITTEE REFERENCE" => {
            "Madam Clerk, please call the items for adoption without committee reference."
        }
        "ADJOURNMENT" => "Madam Clerk, is there any further business? Then we are adjourned.",
        _ => "Madam Clerk, please call the next item.",
    }
}

/// Sections in meeting order; `true` marks sections that carry policy items.
pub(crate) const MEETING_SECTIONS: &[(&str, bool)] = &[
    ("ROLL CALL", false),
    ("APPROVAL OF MEETING MINUTE", false),
    ("CONSENT AGENDA", true),
    ("REGULAR AGENDA", true),
    ("PUBLIC COMMENT", false),
    ("FOR ADOPTION WITHOUT COMMITTEE REFERENCE", true),
    ("ADJOURNMENT", false),
];

const SYLLABLES: &[&str] = &[
    "ba", "ve", "lo", "ri", "ta", "mon", "del", "qui", "sor", "na", "pel", "zu", "ka", "tre", "vin", "gal",
    "mir", "os", "dun", "xe", "lam", "cor", "fi", "bren", "ul", "jo", "wes", "ty", "har", "nix",
];

/// Pronounceable pseudo-word from a sequence of syllable picks.
pub(crate) fn pseudo_word(picks: &[usize]) -> String {
    picks.iter().map(|&i| SYLLABLES[i % SYLLABLES.len()]).collect()
}

pub(crate) const SYLLABLE_COUNT: usize = SYLLABLES.len();
