// Independent transcription of the published synonym and results tables,
// checked against the library's own copies.

pub const SYNONYMS: &[(&str, &str)] = &[
    ("anger", "angry"),
    ("anger", "aggressive"),
    ("anger", "aggression"),
    ("anger", "aggravated"),
    ("anger", "derisive"),
    ("anger", "disapproving"),
    ("anger", "evil"),
    ("anger", "frustrated"),
    ("anger", "frustration"),
    ("anger", "mad"),
    ("anger", "pouty"),
    ("anger", "sulky"),
    ("anger", "sulking"),
    ("anger", "stern"),
    ("anger", "yell"),
    ("anger", "yelling"),
    ("disgust", "contempt"),
    ("disgust", "cringe"),
    ("disgust", "disapproval"),
    ("disgust", "disdain"),
    ("disgust", "disgusted"),
    ("disgust", "gagging"),
    ("disgust", "grimace"),
    ("disgust", "gross"),
    ("disgust", "grossed out"),
    ("fear", "anxious"),
    ("fear", "anxiety"),
    ("fear", "concern"),
    ("fear", "concerned"),
    ("fear", "covering"),
    ("fear", "fearful"),
    ("fear", "frightened"),
    ("fear", "horror"),
    ("fear", "horrified"),
    ("fear", "intense"),
    ("fear", "nervous"),
    ("fear", "scared"),
    ("fear", "scary"),
    ("fear", "scream"),
    ("fear", "screaming"),
    ("fear", "suspicious"),
    ("fear", "tense"),
    ("fear", "terrified"),
    ("fear", "worry"),
    ("fear", "worried"),
    ("happiness", "amused"),
    ("happiness", "confident"),
    ("happiness", "content"),
    ("happiness", "contented"),
    ("happiness", "excited"),
    ("happiness", "excitement"),
    ("happiness", "funny"),
    ("happiness", "giggling"),
    ("happiness", "goofy"),
    ("happiness", "happy"),
    ("happiness", "haha"),
    ("happiness", "hysterical"),
    ("happiness", "joy"),
    ("happiness", "joyful"),
    ("happiness", "kiss"),
    ("happiness", "kissing"),
    ("happiness", "kissy"),
    ("happiness", "laughter"),
    ("happiness", "laughing"),
    ("happiness", "laugh"),
    ("happiness", "peaceful"),
    ("happiness", "satisfied"),
    ("happiness", "seductive"),
    ("happiness", "silly"),
    ("happiness", "singing"),
    ("happiness", "slight smile"),
    ("happiness", "smiling"),
    ("happiness", "smirk"),
    ("happiness", "smirking"),
    ("happiness", "smug"),
    ("happiness", "sticking out their tongue"),
    ("happiness", "sticking out tongue"),
    ("happiness", "sultry"),
    ("happiness", "thumbs up"),
    ("happiness", "tongue"),
    ("sadness", "agony"),
    ("sadness", "anguish"),
    ("sadness", "anguished"),
    ("sadness", "cry"),
    ("sadness", "crying"),
    ("sadness", "disappointment"),
    ("sadness", "disappointed"),
    ("sadness", "discontent"),
    ("sadness", "displeased"),
    ("sadness", "displeasure"),
    ("sadness", "frown"),
    ("sadness", "frowning"),
    ("sadness", "grief"),
    ("sadness", "grim"),
    ("sadness", "pain"),
    ("sadness", "pained"),
    ("sadness", "painful"),
    ("sadness", "pout"),
    ("sadness", "sad"),
    ("sadness", "sorrow"),
    ("sadness", "sorrowful"),
    ("sadness", "sullen"),
    ("sadness", "suffering"),
    ("sadness", "unhappy"),
    ("sadness", "unsmiling"),
    ("sadness", "upset"),
    ("sadness", "wistful"),
    ("surprise", "baffled"),
    ("surprise", "gasp"),
    ("surprise", "perplexed"),
    ("surprise", "shock"),
    ("surprise", "shocked"),
    ("surprise", "slightly confused"),
    ("surprise", "slightly surprised"),
    ("surprise", "surprised"),
    ("neutral", "annoyed"),
    ("neutral", "bald"),
    ("neutral", "bland"),
    ("neutral", "blank"),
    ("neutral", "bored"),
    ("neutral", "boredom"),
    ("neutral", "calm"),
    ("neutral", "concentrated"),
    ("neutral", "concentrating"),
    ("neutral", "concentration"),
    ("neutral", "contemplation"),
    ("neutral", "contemplative"),
    ("neutral", "confused"),
    ("neutral", "confusion"),
    ("neutral", "covered"),
    ("neutral", "curious"),
    ("neutral", "curiosity"),
    ("neutral", "embarrassed"),
    ("neutral", "enigmatic"),
    ("neutral", "focus"),
    ("neutral", "focused"),
    ("neutral", "indecipherable"),
    ("neutral", "indifference"),
    ("neutral", "indifferent"),
    ("neutral", "mysterious"),
    ("neutral", "mystery"),
    ("neutral", "n/a"),
    ("neutral", "nosepick"),
    ("neutral", "open"),
    ("neutral", "peace"),
    ("neutral", "pensive"),
    ("neutral", "prayer"),
    ("neutral", "relaxation"),
    ("neutral", "relaxed"),
    ("neutral", "sarcastic"),
    ("neutral", "sedate"),
    ("neutral", "sedated"),
    ("neutral", "serious"),
    ("neutral", "serene"),
    ("neutral", "serenity"),
    ("neutral", "shh"),
    ("neutral", "shy"),
    ("neutral", "skeptical"),
    ("neutral", "skepticism"),
    ("neutral", "sleeping"),
    ("neutral", "sleepy"),
    ("neutral", "slightly surprised"),
    ("neutral", "speech"),
    ("neutral", "speechless"),
    ("neutral", "squinting"),
    ("neutral", "stupid"),
    ("neutral", "sunglasses"),
    ("neutral", "tired"),
    ("neutral", "thoughtful"),
    ("neutral", "thinking"),
    ("neutral", "v"),
    ("neutral", "yawn"),
    ("neutral", "yawning"),
];

/// (model, setting, WAR/UAR on AffectNet7, FERPlus, RAF-DB, printed mean)
pub type Row = (
    &'static str,
    &'static str,
    [Option<(f64, f64)>; 3],
    (f64, f64),
);

pub const BASELINES: &[Row] = &[
    (
        "ResEmoteNet",
        "AffectNet7",
        [None, Some((0.12, 0.08)), Some((0.15, 0.16))],
        (0.14, 0.12),
    ),
    (
        "ResEmoteNet",
        "FER13",
        [Some((0.31, 0.31)), None, Some((0.50, 0.34))],
        (0.41, 0.33),
    ),
    (
        "ResEmoteNet",
        "RAF-DB",
        [Some((0.27, 0.27)), Some((0.35, 0.21)), None],
        (0.31, 0.24),
    ),
    (
        "Exp-CLIP",
        "CAER-S",
        [Some((0.44, 0.44)), Some((0.55, 0.48)), Some((0.59, 0.65))],
        (0.53, 0.52),
    ),
];

pub const VLM_ROWS: &[Row] = &[
    (
        "BLIP-2 OPT",
        "emoq0",
        [Some((0.27, 0.27)), Some((0.38, 0.21)), Some((0.47, 0.31))],
        (0.37, 0.26),
    ),
    (
        "BLIP-2 OPT",
        "emoq1",
        [Some((0.33, 0.33)), Some((0.57, 0.30)), Some((0.67, 0.44))],
        (0.52, 0.36),
    ),
    (
        "BLIP-2 OPT",
        "emoq2",
        [Some((0.32, 0.32)), Some((0.44, 0.26)), Some((0.62, 0.42))],
        (0.46, 0.33),
    ),
    (
        "BLIP-2 OPT",
        "emoq3",
        [Some((0.28, 0.28)), Some((0.39, 0.24)), Some((0.57, 0.35))],
        (0.41, 0.29),
    ),
    (
        "BLIP-2 FLANT5XL",
        "emoq0",
        [Some((0.21, 0.21)), Some((0.38, 0.21)), Some((0.47, 0.39))],
        (0.35, 0.27),
    ),
    (
        "BLIP-2 FLANT5XL",
        "emoq1",
        [Some((0.33, 0.33)), Some((0.57, 0.30)), Some((0.59, 0.43))],
        (0.50, 0.35),
    ),
    (
        "BLIP-2 FLANT5XL",
        "emoq2",
        [Some((0.34, 0.34)), Some((0.44, 0.26)), Some((0.59, 0.43))],
        (0.46, 0.34),
    ),
    (
        "BLIP-2 FLANT5XL",
        "emoq3",
        [Some((0.34, 0.34)), Some((0.39, 0.24)), Some((0.58, 0.43))],
        (0.44, 0.34),
    ),
    (
        "Florence-VL base-ft",
        "emoq0",
        [Some((0.13, 0.13)), Some((0.35, 0.11)), Some((0.22, 0.15))],
        (0.23, 0.13),
    ),
    (
        "Florence-VL base-ft",
        "emoq1",
        [Some((0.27, 0.27)), Some((0.50, 0.18)), Some((0.52, 0.31))],
        (0.43, 0.25),
    ),
    (
        "Florence-VL base-ft",
        "emoq2",
        [Some((0.26, 0.26)), Some((0.48, 0.17)), Some((0.50, 0.31))],
        (0.41, 0.25),
    ),
    (
        "Florence-VL base-ft",
        "emoq3",
        [Some((0.16, 0.16)), Some((0.36, 0.12)), Some((0.30, 0.19))],
        (0.27, 0.16),
    ),
    (
        "Florence-VL large-ft",
        "emoq0",
        [Some((0.14, 0.14)), Some((0.35, 0.11)), Some((0.22, 0.14))],
        (0.24, 0.13),
    ),
    (
        "Florence-VL large-ft",
        "emoq1",
        [Some((0.38, 0.38)), Some((0.64, 0.30)), Some((0.62, 0.46))],
        (0.55, 0.38),
    ),
    (
        "Florence-VL large-ft",
        "emoq2",
        [Some((0.36, 0.36)), Some((0.63, 0.30)), Some((0.61, 0.44))],
        (0.53, 0.37),
    ),
    (
        "Florence-VL large-ft",
        "emoq3",
        [Some((0.37, 0.37)), Some((0.62, 0.27)), Some((0.62, 0.45))],
        (0.54, 0.36),
    ),
    (
        "LLAMA 3.2 11B",
        "emoq0",
        [Some((0.38, 0.38)), Some((0.60, 0.36)), Some((0.68, 0.54))],
        (0.55, 0.43),
    ),
    (
        "LLAMA 3.2 11B",
        "emoq1",
        [Some((0.41, 0.41)), Some((0.68, 0.38)), Some((0.73, 0.58))],
        (0.61, 0.46),
    ),
    (
        "LLAMA 3.2 11B",
        "emoq2",
        [Some((0.41, 0.41)), Some((0.67, 0.38)), Some((0.73, 0.58))],
        (0.60, 0.46),
    ),
    (
        "LLAMA 3.2 11B",
        "emoq3",
        [Some((0.43, 0.43)), Some((0.66, 0.39)), Some((0.73, 0.60))],
        (0.61, 0.47),
    ),
    (
        "PaliGemma 3b-mix-224",
        "emoq0",
        [Some((0.40, 0.40)), Some((0.70, 0.44)), Some((0.73, 0.56))],
        (0.61, 0.47),
    ),
    (
        "PaliGemma 3b-mix-224",
        "emoq1",
        [Some((0.33, 0.33)), Some((0.61, 0.40)), Some((0.69, 0.55))],
        (0.54, 0.43),
    ),
    (
        "PaliGemma 3b-mix-224",
        "emoq2",
        [Some((0.36, 0.36)), Some((0.57, 0.39)), Some((0.67, 0.56))],
        (0.53, 0.44),
    ),
    (
        "PaliGemma 3b-mix-224",
        "emoq3",
        [Some((0.36, 0.36)), Some((0.58, 0.40)), Some((0.66, 0.55))],
        (0.53, 0.44),
    ),
    (
        "PaliGemma 3b-mix-448",
        "emoq0",
        [Some((0.48, 0.48)), Some((0.63, 0.42)), Some((0.77, 0.62))],
        (0.63, 0.51),
    ),
    (
        "PaliGemma 3b-mix-448",
        "emoq1",
        [Some((0.28, 0.28)), Some((0.54, 0.37)), Some((0.64, 0.53))],
        (0.49, 0.39),
    ),
    (
        "PaliGemma 3b-mix-448",
        "emoq2",
        [Some((0.29, 0.29)), Some((0.52, 0.37)), Some((0.64, 0.53))],
        (0.48, 0.40),
    ),
    (
        "PaliGemma 3b-mix-448",
        "emoq3",
        [Some((0.23, 0.23)), Some((0.50, 0.37)), Some((0.58, 0.50))],
        (0.44, 0.37),
    ),
];
