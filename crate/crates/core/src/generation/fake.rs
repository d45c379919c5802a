//! Rule-based fake values for every label, drawn from per-locale tables.

use serde::{Deserialize, Serialize};

use crate::locale::{DateFormat, Locale};
use crate::model::Label;
use crate::prompting::{input_seed, SplitMix64};

/// How fake-value streams are seeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FakeStream {
    /// One stream per document, seeded from the record id, shared by all
    /// labels. Draw order therefore depends on which labels consume it.
    #[default]
    PerDocument,
    /// One stream per (document, label).
    Independent,
    /// Every document restarts from the same seed.
    Fixed,
}

impl std::str::FromStr for FakeStream {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "per_document" => Ok(FakeStream::PerDocument),
            "independent" => Ok(FakeStream::Independent),
            "fixed" => Ok(FakeStream::Fixed),
            _ => Err(format!("unknown fake stream policy `{s}`")),
        }
    }
}

/// Generator state confined to one document.
#[derive(Debug, Clone)]
pub struct FakeGenState {
    seed: u64,
    policy: FakeStream,
    shared: SplitMix64,
    per_label: Vec<SplitMix64>,
    draws: [u64; 8],
}

fn label_index(label: Label) -> usize {
    Label::ALL.iter().position(|l| *l == label).expect("label in ALL")
}

impl FakeGenState {
    pub fn new(seed: u64, policy: FakeStream) -> Self {
        let per_label =
            (0..8u64).map(|i| SplitMix64::new(seed ^ (i + 1).wrapping_mul(0xA076_1D64_78BD_642F))).collect();
        Self { seed, policy, shared: SplitMix64::new(seed), per_label, draws: [0; 8] }
    }

    pub fn for_document(record_id: &str, policy: FakeStream) -> Self {
        let seed = match policy {
            FakeStream::Fixed => 0,
            _ => input_seed(record_id),
        };
        Self::new(seed, policy)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn draws(&self, label: Label) -> u64 {
        self.draws[label_index(label)]
    }

    fn rng(&mut self, label: Label) -> &mut SplitMix64 {
        let i = label_index(label);
        self.draws[i] += 1;
        match self.policy {
            FakeStream::Independent => &mut self.per_label[i],
            _ => &mut self.shared,
        }
    }
}

fn pick<'a>(rng: &mut SplitMix64, items: &[&'a str]) -> &'a str {
    items[rng.below(items.len())]
}

fn digits(rng: &mut SplitMix64, n: usize) -> String {
    (0..n).map(|_| char::from(b'0' + rng.below(10) as u8)).collect()
}

fn nonzero_digits(rng: &mut SplitMix64, n: usize) -> String {
    let mut s = char::from(b'1' + rng.below(9) as u8).to_string();
    s.push_str(&digits(rng, n - 1));
    s
}

struct LocaleTables {
    first: &'static [&'static str],
    last: &'static [&'static str],
    ascii: &'static [&'static str],
    mail_domains: &'static [&'static str],
    tld: &'static str,
}

const EN: LocaleTables = LocaleTables {
    first: &[
        "Aaron", "Abigail", "Adrian", "Alicia", "Brandon", "Brianna", "Caleb", "Chloe", "Dominic", "Dana", "Elliot",
        "Erin", "Felix", "Fiona", "Gavin", "Grace", "Hector", "Hannah", "Isaac", "Ivy", "Jared", "Julia", "Kevin",
        "Kelsey", "Logan", "Lauren", "Mason", "Megan", "Nathan", "Nora", "Owen", "Paige", "Quentin", "Rachel", "Seth",
        "Tessa", "Tyler", "Vanessa", "Wesley", "Zoe",
    ],
    last: &[
        "Abbott",
        "Barrett",
        "Caldwell",
        "Dawson",
        "Ellison",
        "Fletcher",
        "Garrison",
        "Holloway",
        "Ingram",
        "Jennings",
        "Kendall",
        "Lambert",
        "Mercer",
        "Norwood",
        "Oakley",
        "Prescott",
        "Quinlan",
        "Ramsey",
        "Sawyer",
        "Thornton",
        "Underwood",
        "Vaughn",
        "Whitaker",
        "Yates",
        "Ashford",
        "Blackwell",
        "Crawford",
        "Dalton",
        "Emerson",
        "Fairbanks",
        "Goodwin",
        "Harlow",
        "Kirby",
        "Lowell",
        "Manning",
        "Nash",
        "Pruitt",
        "Rowland",
        "Spencer",
        "Tillman",
    ],
    ascii: &[],
    mail_domains: &["inboxly.com", "postmark.net", "mailhaven.org", "quickmail.io", "letterbox.us"],
    tld: "com",
};

const DE: LocaleTables = LocaleTables {
    first: &[
        "Jonas",
        "Lukas",
        "Maximilian",
        "Leon",
        "Paul",
        "Finn",
        "Emma",
        "Mia",
        "Sophie",
        "Lea",
        "Marie",
        "Johanna",
        "Tobias",
        "Florian",
        "Sebastian",
        "Katharina",
        "Matthias",
        "Greta",
        "Jannik",
        "Frieda",
    ],
    last: &[
        "Schulze",
        "Richter",
        "Wolf",
        "Schröder",
        "Koch",
        "Schäfer",
        "Braun",
        "Lange",
        "Werner",
        "Krause",
        "Lehmann",
        "Köhler",
        "Maier",
        "Walter",
        "König",
        "Fuchs",
        "Vogel",
        "Sommer",
        "Jung",
        "Hartmann",
    ],
    ascii: &["jonas", "lukas", "leon", "emma", "mia", "lea", "richter", "wolf", "koch", "braun", "lange", "vogel"],
    mail_domains: &["webpost.de", "mailzentrale.de", "briefkasten.de"],
    tld: "de",
};

const ES: LocaleTables = LocaleTables {
    first: &[
        "Alejandro",
        "Valentina",
        "Mateo",
        "Camila",
        "Santiago",
        "Ximena",
        "Emiliano",
        "Regina",
        "Leonardo",
        "Renata",
        "Andrés",
        "Daniela",
        "Javier",
        "Paola",
        "Fernando",
        "Gabriela",
        "Ricardo",
        "Mariana",
    ],
    last: &[
        "López",
        "González",
        "Pérez",
        "Martínez",
        "Gómez",
        "Díaz",
        "Torres",
        "Flores",
        "Rivera",
        "Ruiz",
        "Mendoza",
        "Cruz",
        "Reyes",
        "Romero",
        "Navarro",
        "Delgado",
        "Vargas",
        "Guerrero",
    ],
    ascii: &["mateo", "camila", "santiago", "regina", "torres", "flores", "rivera", "cruz", "reyes", "vargas"],
    mail_domains: &["correo.mx", "buzon.com.mx", "mensajes.mx"],
    tld: "mx",
};

const JA: LocaleTables = LocaleTables {
    first: &["大翔", "蓮", "陽菜", "結衣", "翔太", "美優", "健太", "彩花", "拓也", "由美", "誠", "真由美"],
    last: &[
        "伊藤",
        "木村",
        "林",
        "清水",
        "山口",
        "森",
        "池田",
        "橋本",
        "石川",
        "前田",
        "藤田",
        "岡田",
        "後藤",
        "長谷川",
        "村上",
    ],
    ascii: &["tanaka", "sato", "hiroshi", "yuki", "kenji", "akira", "haruka", "sakura", "ito", "kimura", "mori"],
    mail_domains: &["yubin.jp", "denshi.co.jp", "tegami.ne.jp"],
    tld: "jp",
};

const ZH: LocaleTables = LocaleTables {
    first: &[
        "子轩", "欣怡", "浩然", "梓涵", "宇航", "诗琪", "俊杰", "雨桐", "志强", "秀英", "建华", "玉兰", "晓明", "海燕",
        "文博", "静怡",
    ],
    last: &["杨", "赵", "林", "何", "高", "罗", "梁", "宋", "谢", "韩", "唐", "冯", "于", "董", "萧", "程", "曹"],
    ascii: &["wang", "li", "zhang", "liu", "chen", "wei", "fang", "min", "jie", "yang", "hao", "xin"],
    mail_domains: &["youxiang.cn", "dianyou.com.cn", "xinxiang.cn"],
    tld: "cn",
};

const URL_WORDS: &[&str] = &[
    "bright", "cloud", "delta", "ember", "forge", "harbor", "lumen", "maple", "nimbus", "orbit", "pixel", "quartz",
    "river", "summit", "tandem", "vertex", "willow", "zenith",
];
const URL_PATHS: &[&str] = &["account", "login", "profile", "billing", "portal", "docs", "support", "orders"];
const BASE62: &[u8] = b"0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";
const MONTHS: [&str; 12] = ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"];

fn tables(locale: Locale) -> &'static LocaleTables {
    match locale {
        Locale::En => &EN,
        Locale::De => &DE,
        Locale::Es => &ES,
        Locale::Ja => &JA,
        Locale::Zh => &ZH,
    }
}

fn person(rng: &mut SplitMix64, locale: Locale) -> String {
    let t = tables(locale);
    let first = pick(rng, t.first);
    let last = pick(rng, t.last);
    match locale {
        Locale::Ja | Locale::Zh => format!("{last}{first}"),
        _ => format!("{first} {last}"),
    }
}

fn address(rng: &mut SplitMix64, locale: Locale) -> String {
    match locale {
        Locale::En => {
            const STREETS: &[&str] = &[
                "Oak",
                "Cedar",
                "Elm",
                "Birch",
                "Willow",
                "Highland",
                "Sunset",
                "Ridge",
                "Lincoln",
                "Franklin",
                "Jefferson",
                "Madison",
                "Riverside",
                "Meadow",
                "Chestnut",
                "Hillcrest",
            ];
            const TYPES: &[&str] = &["Street", "Avenue", "Road", "Lane", "Drive", "Court", "Boulevard", "Way"];
            const CITIES: &[&str] = &[
                "Denver CO 80202",
                "Atlanta GA 30303",
                "Phoenix AZ 85004",
                "Nashville TN 37203",
                "Raleigh NC 27601",
                "Omaha NE 68102",
                "Tampa FL 33602",
                "Madison WI 53703",
                "Pune 411001",
                "Chennai 600002",
                "Hyderabad 500001",
                "Jaipur 302001",
            ];
            let n = 1 + rng.below(9899);
            format!("{n} {} {}, {}", pick(rng, STREETS), pick(rng, TYPES), pick(rng, CITIES))
        }
        Locale::De => {
            const STEMS: &[&str] =
                &["Garten", "Schul", "Kirch", "Mühlen", "Wald", "Sonnen", "Linden", "Birken", "Ahorn"];
            const SUFFIXES: &[&str] = &["straße", "allee", "platz"];
            const CITIES: &[&str] = &[
                "10115 Berlin",
                "20095 Hamburg",
                "80331 München",
                "50667 Köln",
                "60311 Frankfurt",
                "70173 Stuttgart",
                "40213 Düsseldorf",
                "28195 Bremen",
            ];
            let n = 1 + rng.below(149);
            format!("{}{} {n}, {}", pick(rng, STEMS), pick(rng, SUFFIXES), pick(rng, CITIES))
        }
        Locale::Es => {
            const TYPES: &[&str] = &["Calle", "Avenida", "Privada", "Calzada"];
            const NAMES: &[&str] =
                &["Juárez", "Independencia", "Allende", "Zaragoza", "Guerrero", "Aldama", "Obregón", "Carranza"];
            const CITIES: &[&str] = &[
                "06600 CDMX",
                "44100 Guadalajara",
                "64000 Monterrey",
                "72000 Puebla",
                "37000 León",
                "97000 Mérida",
                "22000 Tijuana",
            ];
            let n = 1 + rng.below(1999);
            format!("{} {} {n}, {}", pick(rng, TYPES), pick(rng, NAMES), pick(rng, CITIES))
        }
        Locale::Ja => {
            const CITIES: &[&str] = &[
                "東京都世田谷区",
                "大阪府堺市",
                "神奈川県川崎市",
                "埼玉県さいたま市",
                "福岡県北九州市",
                "北海道函館市",
                "宮城県仙台市青葉区",
                "広島県広島市中区",
            ];
            const TOWNS: &[&str] = &["緑が丘", "桜ケ丘", "みなと町", "つつじが丘", "ひばりが丘", "あさひ町"];
            let (a, b, c) = (1 + rng.below(9), 1 + rng.below(30), 1 + rng.below(20));
            format!("{}{}{a}-{b}-{c}", pick(rng, CITIES), pick(rng, TOWNS))
        }
        Locale::Zh => {
            const CITIES: &[&str] = &[
                "江苏省苏州市",
                "山东省青岛市",
                "河南省郑州市",
                "湖南省长沙市",
                "辽宁省大连市",
                "云南省昆明市",
                "安徽省合肥市",
            ];
            const DISTRICTS: &[&str] = &["高新区", "市南区", "金水区", "岳麓区", "中山区", "五华区"];
            const ROADS: &[&str] = &["人民路", "解放路", "建设路", "和平路", "长江路", "黄河路"];
            let n = 1 + rng.below(499);
            format!("{}{}{}{n}号", pick(rng, CITIES), pick(rng, DISTRICTS), pick(rng, ROADS))
        }
    }
}

fn ascii_name_part(rng: &mut SplitMix64, locale: Locale) -> String {
    let t = tables(locale);
    if t.ascii.is_empty() {
        let from = if rng.below(2) == 0 { t.first } else { t.last };
        pick(rng, from).to_lowercase()
    } else {
        pick(rng, t.ascii).to_string()
    }
}

fn email(rng: &mut SplitMix64, locale: Locale) -> String {
    let a = ascii_name_part(rng, locale);
    let b = ascii_name_part(rng, locale);
    let n = rng.below(100);
    let domain = pick(rng, tables(locale).mail_domains);
    format!("{a}.{b}{n}@{domain}")
}

fn phone(rng: &mut SplitMix64, locale: Locale) -> String {
    match locale {
        Locale::En => format!("({}) {}-{}", nonzero_digits(rng, 3), nonzero_digits(rng, 3), digits(rng, 4)),
        Locale::De => format!("+49 {} {}", nonzero_digits(rng, 3), digits(rng, 7)),
        Locale::Es => format!("+52 55 {} {}", digits(rng, 4), digits(rng, 4)),
        Locale::Ja => format!("0{}-{}-{}", nonzero_digits(rng, 2), digits(rng, 4), digits(rng, 4)),
        Locale::Zh => format!("+86 1{} {} {}", digits(rng, 2), digits(rng, 4), digits(rng, 4)),
    }
}

fn url(rng: &mut SplitMix64, locale: Locale) -> String {
    let (a, b) = (pick(rng, URL_WORDS), pick(rng, URL_WORDS));
    let path = pick(rng, URL_PATHS);
    format!("https://www.{a}{b}.{}/{path}", tables(locale).tld)
}

fn secret(rng: &mut SplitMix64) -> String {
    let body: String = (0..24).map(|_| char::from(BASE62[rng.below(BASE62.len())])).collect();
    format!("sk_{body}")
}

fn default_date_format(locale: Locale) -> DateFormat {
    match locale {
        Locale::En => DateFormat::MdySlash,
        Locale::De => DateFormat::DmyDashMon,
        Locale::Es => DateFormat::DmySlash,
        Locale::Ja | Locale::Zh => DateFormat::YmdDash,
    }
}

fn date(rng: &mut SplitMix64, locale: Locale, format: Option<DateFormat>) -> String {
    let format = match format {
        Some(DateFormat::Unknown) | None => default_date_format(locale),
        Some(f) => f,
    };
    let year = 1950 + rng.below(60);
    let month = 1 + rng.below(12);
    // dmy_slash needs day > 12 to stay unambiguous
    let day = if format == DateFormat::DmySlash { 13 + rng.below(16) } else { 1 + rng.below(28) };
    match format {
        DateFormat::MdySlash => format!("{month:02}/{day:02}/{year}"),
        DateFormat::YmdDash => format!("{year}-{month:02}-{day:02}"),
        DateFormat::DmyDashMon => format!("{day:02}-{}-{year}", MONTHS[month - 1]),
        DateFormat::DmySlash => format!("{day:02}/{month:02}/{year}"),
        DateFormat::Unknown => unreachable!("resolved above"),
    }
}

/// Draws a fake value of `label`'s type. `date_format` is honored for
/// DATE when it is a known format; otherwise the locale default is used.
pub fn fake_value(label: Label, locale: Locale, date_format: Option<DateFormat>, state: &mut FakeGenState) -> String {
    let rng = state.rng(label);
    match label {
        Label::Person => person(rng, locale),
        Label::Address => address(rng, locale),
        Label::Date => date(rng, locale, date_format),
        Label::Email => email(rng, locale),
        Label::Phone => phone(rng, locale),
        Label::Account => nonzero_digits(rng, 12),
        Label::Url => url(rng, locale),
        Label::Secret => secret(rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::detect_rules;
    use crate::locale::{classify_date_format, classify_locale};

    #[test]
    fn same_seed_same_values() {
        let draw = || {
            let mut s = FakeGenState::new(42, FakeStream::PerDocument);
            Label::ALL.map(|l| fake_value(l, Locale::En, None, &mut s))
        };
        assert_eq!(draw(), draw());
    }

    #[test]
    fn shapes_match_labels() {
        let mut s = FakeGenState::new(7, FakeStream::PerDocument);
        for locale in Locale::ALL {
            for _ in 0..50 {
                let email = fake_value(Label::Email, locale, None, &mut s);
                let (user, domain) = email.split_once('@').unwrap();
                assert!(!user.is_empty() && domain.contains('.'), "{email}");
                assert!(email.is_ascii());

                let phone = fake_value(Label::Phone, locale, None, &mut s);
                assert!(phone.chars().all(|c| c.is_ascii_digit() || " +()-".contains(c)), "{phone}");
                assert!(phone.chars().filter(char::is_ascii_digit).count() >= 7);

                let date = fake_value(Label::Date, locale, None, &mut s);
                assert_ne!(classify_date_format(&date), DateFormat::Unknown, "{date}");

                let account = fake_value(Label::Account, locale, None, &mut s);
                assert_eq!(account.len(), 12);

                let url = fake_value(Label::Url, locale, None, &mut s);
                assert!(url.starts_with("https://"));
            }
        }
    }

    #[test]
    fn date_format_is_honored() {
        let mut s = FakeGenState::new(1, FakeStream::PerDocument);
        for format in DateFormat::ALL.into_iter().filter(|f| *f != DateFormat::Unknown) {
            for _ in 0..30 {
                let d = fake_value(Label::Date, Locale::En, Some(format), &mut s);
                assert_eq!(classify_date_format(&d), format, "{d}");
            }
        }
    }

    #[test]
    fn person_scripts_follow_locale() {
        let mut s = FakeGenState::new(3, FakeStream::PerDocument);
        for _ in 0..30 {
            let zh = fake_value(Label::Person, Locale::Zh, None, &mut s);
            assert!(zh.chars().all(|c| ('\u{4E00}'..='\u{9FFF}').contains(&c)), "{zh}");
            assert_eq!(classify_locale(&fake_value(Label::Address, Locale::De, None, &mut s)), Locale::De);
            assert_eq!(classify_locale(&fake_value(Label::Address, Locale::Ja, None, &mut s)), Locale::Ja);
        }
    }

    #[test]
    fn rule_detector_finds_patterned_fakes() {
        let mut s = FakeGenState::new(9, FakeStream::PerDocument);
        for label in [Label::Email, Label::Phone, Label::Account, Label::Url, Label::Date] {
            let v = fake_value(label, Locale::En, None, &mut s);
            let spans = detect_rules(&format!("value: {v} end"));
            assert_eq!(spans.len(), 1, "{label} {v}");
            assert_eq!(spans[0].label, label, "{v}");
            assert_eq!(spans[0].surface, v);
        }
    }

    #[test]
    fn stream_policies() {
        // shared stream: an extra PERSON draw shifts the EMAIL value
        let mut a = FakeGenState::new(5, FakeStream::PerDocument);
        let mut b = FakeGenState::new(5, FakeStream::PerDocument);
        fake_value(Label::Person, Locale::En, None, &mut b);
        assert_ne!(
            fake_value(Label::Email, Locale::En, None, &mut a),
            fake_value(Label::Email, Locale::En, None, &mut b)
        );
        // independent streams: it does not
        let mut a = FakeGenState::new(5, FakeStream::Independent);
        let mut b = FakeGenState::new(5, FakeStream::Independent);
        fake_value(Label::Person, Locale::En, None, &mut b);
        assert_eq!(
            fake_value(Label::Email, Locale::En, None, &mut a),
            fake_value(Label::Email, Locale::En, None, &mut b)
        );
        assert_eq!(b.draws(Label::Person), 1);

        assert_eq!(FakeGenState::for_document("a", FakeStream::Fixed).seed(), 0);
        assert_ne!(
            FakeGenState::for_document("a", FakeStream::PerDocument).seed(),
            FakeGenState::for_document("b", FakeStream::PerDocument).seed()
        );
    }
}
