//! Hermetic synthetic documents. Value tables here are kept apart from the
//! fake-value tables and from every demonstration string, so a leaked
//! ground-truth value can only come from the input.

use std::collections::BTreeMap;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{CorpusRecord, Label};

pub const TEMPLATES: [&str; 7] =
    ["form_1099", "w2", "auto_insurance", "bank_statement", "invoice", "mortgage_insurance", "paystub"];

/// Weighted locale tags.
#[derive(Debug, Clone, PartialEq)]
pub struct LocaleMix(pub Vec<(String, f64)>);

impl Default for LocaleMix {
    fn default() -> Self {
        Self::from_pairs(&[
            ("en_US", 0.42),
            ("en_IN", 0.16),
            ("de_DE", 0.12),
            ("es_MX", 0.10),
            ("ja_JP", 0.10),
            ("zh_CN", 0.10),
        ])
    }
}

impl LocaleMix {
    fn from_pairs(pairs: &[(&str, f64)]) -> Self {
        Self(pairs.iter().map(|(t, w)| (t.to_string(), *w)).collect())
    }

    /// en_US and en_IN in the default ratio.
    pub fn english() -> Self {
        Self::from_pairs(&[("en_US", 0.42), ("en_IN", 0.16)])
    }

    fn pick(&self, rng: &mut ChaCha8Rng) -> &str {
        let total: f64 = self.0.iter().map(|(_, w)| w).sum();
        let mut x = rng.random::<f64>() * total;
        for (tag, w) in &self.0 {
            if x < *w {
                return tag;
            }
            x -= w;
        }
        &self.0.last().expect("non-empty mix").0
    }
}

impl std::str::FromStr for LocaleMix {
    type Err = String;
    /// `en` (english only), `default`, or `tag=weight,tag=weight`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "default" | "" => return Ok(Self::default()),
            "en" => return Ok(Self::english()),
            _ => {}
        }
        let mut pairs = Vec::new();
        for part in s.split(',') {
            let (tag, w) = part.split_once('=').ok_or_else(|| format!("expected tag=weight, got `{part}`"))?;
            let w: f64 = w.trim().parse().map_err(|_| format!("bad weight in `{part}`"))?;
            if w.is_nan() || w < 0.0 {
                return Err(format!("negative weight in `{part}`"));
            }
            let tag = tag.trim();
            if !LOCALES.iter().any(|l| l.tag == tag) {
                return Err(format!("unsupported locale `{tag}`"));
            }
            pairs.push((tag.to_string(), w));
        }
        if pairs.iter().map(|(_, w)| w).sum::<f64>() <= 0.0 {
            return Err("weights sum to zero".into());
        }
        Ok(Self(pairs))
    }
}

#[derive(Clone, Copy)]
enum NameOrder {
    GivenFirst,
    FamilyFirst,
}

/// Synthetic date styles.
#[derive(Clone, Copy)]
enum DateStyle {
    MdySlash,
    YmdDash,
    DmyDashMon,
    DmySlash,
    Long,
    Dotted,
    Kanji,
}

struct SynthLocale {
    tag: &'static str,
    given: &'static [&'static str],
    family: &'static [&'static str],
    order: NameOrder,
    romaji: &'static [&'static str],
    domains: &'static [&'static str],
    streets: &'static [&'static str],
    street_types: &'static [&'static str],
    cities: &'static [&'static str],
    towns: &'static [&'static str],
    dates: &'static [(DateStyle, u32)],
    phone: fn(&mut ChaCha8Rng) -> String,
    tld: &'static str,
}

fn d(rng: &mut ChaCha8Rng, n: usize) -> String {
    (0..n).map(|_| char::from(b'0' + rng.random_range(0..10u8))).collect()
}

fn nd(rng: &mut ChaCha8Rng, n: usize) -> String {
    let mut s = char::from(b'2' + rng.random_range(0..8u8)).to_string();
    s.push_str(&d(rng, n - 1));
    s
}

const LOCALES: [SynthLocale; 6] = [
    SynthLocale {
        tag: "en_US",
        given: &[
            "Bradley",
            "Courtney",
            "Desmond",
            "Everett",
            "Francine",
            "Gordon",
            "Harriet",
            "Irving",
            "Josephine",
            "Kenneth",
            "Lorraine",
            "Marshall",
            "Nadine",
            "Orville",
            "Priscilla",
            "Randall",
            "Shirley",
            "Thaddeus",
            "Ursula",
            "Vernon",
            "Winifred",
            "Clifford",
            "Rosalind",
            "Stanley",
            "Beverly",
            "Lyle",
            "Maxine",
            "Russell",
            "Colleen",
            "Douglas",
        ],
        family: &[
            "Hargrove",
            "Pennington",
            "Whitfield",
            "Brockman",
            "Donnelly",
            "Fairchild",
            "Gallagher",
            "Hutchins",
            "Kowalski",
            "Lindqvist",
            "McAllister",
            "Northrup",
            "Ostrander",
            "Pickering",
            "Rutledge",
            "Stroud",
            "Thibodeaux",
            "Vandermeer",
            "Wexler",
            "Yarborough",
            "Castellano",
            "Delacroix",
            "Esposito",
            "Forsythe",
            "Grimaldi",
            "Holcomb",
            "Jorgensen",
            "Kingsley",
            "Lockhart",
            "Merriweather",
        ],
        order: NameOrder::GivenFirst,
        romaji: &[],
        domains: &["northwind-mail.com", "riverpost.net", "bluefinch.org"],
        streets: &[
            "Magnolia",
            "Sycamore",
            "Juniper",
            "Poplar",
            "Hawthorne",
            "Laurel",
            "Spruce",
            "Alder",
            "Aspen",
            "Cypress",
            "Hickory",
            "Walnut",
        ],
        street_types: &["St", "Ave", "Rd", "Blvd", "Pl", "Ter"],
        cities: &[
            "Columbus OH 43201",
            "Boise ID 83702",
            "Albany NY 12207",
            "Tucson AZ 85701",
            "Reno NV 89501",
            "Dayton OH 45402",
            "Spokane WA 99201",
            "Savannah GA 31401",
        ],
        towns: &[],
        dates: &[(DateStyle::MdySlash, 8), (DateStyle::YmdDash, 1), (DateStyle::Long, 1)],
        phone: |r| format!("{}-{}-{}", nd(r, 3), nd(r, 3), d(r, 4)),
        tld: "com",
    },
    SynthLocale {
        tag: "en_IN",
        given: &[
            "Aarav",
            "Ishaan",
            "Kavya",
            "Rohan",
            "Meera",
            "Vikram",
            "Anjali",
            "Siddharth",
            "Pooja",
            "Arjun",
            "Lakshmi",
            "Nikhil",
            "Divya",
            "Karthik",
            "Shreya",
            "Varun",
            "Neha",
            "Aditya",
            "Tanvi",
            "Rahul",
        ],
        family: &[
            "Deshpande",
            "Raghavan",
            "Chaturvedi",
            "Banerjee",
            "Kulkarni",
            "Menon",
            "Bhattacharya",
            "Nair",
            "Agarwal",
            "Joshi",
            "Reddy",
            "Pillai",
            "Chopra",
            "Malhotra",
            "Saxena",
            "Venkatesan",
            "Ghosh",
            "Trivedi",
            "Mehta",
            "Rao",
        ],
        order: NameOrder::GivenFirst,
        romaji: &[],
        domains: &["indpost.in", "saathi-mail.co.in"],
        streets: &["Brigade", "Residency", "Linking", "Nehru", "Station", "Temple", "Gandhi", "Ring"],
        street_types: &["Road", "Marg", "Lane", "Nagar"],
        cities: &[
            "Pune 411004",
            "Chennai 600040",
            "Hyderabad 500033",
            "Jaipur 302017",
            "Lucknow 226010",
            "Kochi 682016",
        ],
        towns: &[],
        dates: &[(DateStyle::DmyDashMon, 5), (DateStyle::DmySlash, 4), (DateStyle::Long, 1)],
        phone: |r| format!("+91 9{} {}", d(r, 4), d(r, 5)),
        tld: "in",
    },
    SynthLocale {
        tag: "de_DE",
        given: &[
            "Wolfgang",
            "Ursula",
            "Jürgen",
            "Gisela",
            "Dieter",
            "Renate",
            "Manfred",
            "Sabine",
            "Günter",
            "Heike",
            "Rüdiger",
            "Monika",
            "Bernd",
            "Elke",
            "Horst",
            "Karin",
            "Uwe",
            "Brunhilde",
            "Volker",
            "Dörte",
        ],
        family: &[
            "Lorenz",
            "Pohl",
            "Engel",
            "Graf",
            "Horn",
            "Brandt",
            "Haas",
            "Schreiber",
            "Ziegler",
            "Kühn",
            "Seidel",
            "Winkler",
            "Busch",
            "Frank",
            "Voigt",
            "Jäger",
            "Ludwig",
            "Böhm",
            "Oswald",
            "Thiele",
        ],
        order: NameOrder::GivenFirst,
        romaji: &["wolfgang", "dieter", "sabine", "heike", "lorenz", "pohl", "engel", "brandt", "haas", "busch"],
        domains: &["kontor-mail.de", "postfach24.de"],
        streets: &["Tulpen", "Eichen", "Buchen", "Tannen", "Feld", "Wiesen", "Bach", "Mozart"],
        street_types: &["straße", "allee", "platz"],
        cities: &["04229 Leipzig", "30159 Hannover", "90402 Nürnberg", "45127 Essen", "79098 Freiburg", "24103 Kiel"],
        towns: &[],
        dates: &[(DateStyle::Dotted, 3), (DateStyle::DmySlash, 4), (DateStyle::YmdDash, 3)],
        phone: |r| format!("0{}/{}", nd(r, 3), d(r, 7)),
        tld: "de",
    },
    SynthLocale {
        tag: "es_MX",
        given: &[
            "Guadalupe",
            "Rigoberto",
            "Maricela",
            "Esteban",
            "Yolanda",
            "Armando",
            "Leticia",
            "Gerardo",
            "Rocío",
            "Ignacio",
            "Consuelo",
            "Octavio",
            "Itzel",
            "Rodrigo",
            "Araceli",
            "Efraín",
            "Nayeli",
            "Joaquín",
        ],
        family: &[
            "Zamora",
            "Villalobos",
            "Cárdenas",
            "Espinoza",
            "Bustamante",
            "Quintero",
            "Salgado",
            "Ochoa",
            "Treviño",
            "Montes",
            "Barrera",
            "Lozano",
            "Cervantes",
            "Peña",
            "Arellano",
            "Sotelo",
            "Ibarra",
            "Valdez",
        ],
        order: NameOrder::GivenFirst,
        romaji: &["guadalupe", "esteban", "armando", "rodrigo", "zamora", "ochoa", "montes", "lozano", "ibarra"],
        domains: &["correo-azul.mx", "buzonmx.com.mx"],
        streets: &["Matamoros", "Victoria", "Galeana", "Abasolo", "Mina", "Bravo", "Pino Suárez", "Iturbide"],
        street_types: &["Calle", "Avenida"],
        cities: &[
            "45050 Zapopan",
            "20000 Aguascalientes",
            "78000 San Luis Potosí",
            "58000 Morelia",
            "83000 Hermosillo",
            "31000 Chihuahua",
        ],
        towns: &[],
        dates: &[(DateStyle::DmySlash, 7), (DateStyle::YmdDash, 3)],
        phone: |r| format!("+52 {} {} {}", nd(r, 2), d(r, 4), d(r, 4)),
        tld: "mx",
    },
    SynthLocale {
        tag: "ja_JP",
        given: &[
            "悠人",
            "陽翔",
            "湊",
            "樹",
            "結菜",
            "葵",
            "凛",
            "芽依",
            "あおい",
            "ひなた",
            "みお",
            "ゆうき",
            "かな",
            "はると",
            "直樹",
            "千尋",
        ],
        family: &[
            "吉田", "山本", "阿部", "遠藤", "青木", "坂本", "西村", "福田", "太田", "三浦", "藤井", "岡本", "松田",
            "中川", "小野", "竹内",
        ],
        order: NameOrder::FamilyFirst,
        romaji: &["yoshida", "yamamoto", "abe", "endo", "aoki", "haruto", "aoi", "hinata", "mio", "naoki"],
        domains: &["sakura-net.jp", "hikari-mail.ne.jp"],
        streets: &[],
        street_types: &[],
        cities: &[
            "京都府京都市左京区",
            "愛知県名古屋市中区",
            "兵庫県姫路市",
            "千葉県千葉市美浜区",
            "静岡県静岡市葵区",
            "新潟県新潟市中央区",
            "岡山県岡山市北区",
            "熊本県熊本市中央区",
        ],
        towns: &["ゆりが丘", "すずらん通り", "さつき町", "もみじ台", "はなみずき通り", "かえで町"],
        dates: &[(DateStyle::YmdDash, 8), (DateStyle::Kanji, 2)],
        phone: |r| format!("0{}-{}-{}", nd(r, 1), d(r, 4), d(r, 4)),
        tld: "jp",
    },
    SynthLocale {
        tag: "zh_CN",
        given: &[
            "丽娜", "国强", "婷婷", "佳怡", "明轩", "嘉豪", "思远", "若曦", "天佑", "慧敏", "鹏飞", "梦瑶", "振宇",
            "雅婷", "紫萱", "家乐", "美玲", "少华", "春梅", "立新",
        ],
        family: &[
            "朱", "胡", "郭", "许", "邓", "彭", "曾", "蒋", "蔡", "贾", "丁", "魏", "薛", "叶", "阎", "潘", "杜", "戴",
            "夏", "钟",
        ],
        order: NameOrder::FamilyFirst,
        romaji: &["zhu", "hu", "guo", "xu", "deng", "peng", "lina", "guoqiang", "tingting", "jiayi", "mingxuan"],
        domains: &["huaxia-mail.cn", "changcheng.com.cn"],
        streets: &["滨江路", "新华路", "青年路", "光明路", "友谊路", "北京路"],
        street_types: &[],
        cities: &["四川省绵阳市", "福建省福州市", "江西省南昌市", "山西省太原市", "吉林省长春市", "甘肃省兰州市"],
        towns: &["涪城区", "鼓楼区", "东湖区", "迎泽区", "朝阳区", "城关区"],
        dates: &[(DateStyle::YmdDash, 8), (DateStyle::Kanji, 2)],
        phone: |r| format!("+86 13{} {} {}", d(r, 1), d(r, 4), d(r, 4)),
        tld: "cn",
    },
];

const URL_HOSTS: &[&str] = &["portal", "secure", "my", "app", "online"];
const URL_WORDS: &[&str] =
    &["acmefin", "copperleaf", "granitebank", "sunpeak", "tidewater", "ironbridge", "greenfield", "stonegate"];
const HEX: &[u8] = b"0123456789abcdef";
const ALNUM_UPPER: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ234567";
const MONTHS: [&str; 12] = ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"];
const MONTHS_LONG: [&str; 12] = [
    "January",
    "February",
    "March",
    "April",
    "May",
    "June",
    "July",
    "August",
    "September",
    "October",
    "November",
    "December",
];
// dates appearing in the demonstration pools; synthetic dates avoid them
const RESERVED_DATES: &[&str] = &[
    "03/15/1985",
    "07/22/1991",
    "11/02/1978",
    "04/09/1983",
    "06/30/2001",
    "09/14/1996",
    "01/07/1969",
    "12/03/1974",
    "08/19/1990",
    "02/26/1987",
    "1998-07-11",
    "2003-08-05",
    "1985-03-15",
    "1991-11-27",
    "2010-12-01",
    "2007-06-18",
    "1976-09-23",
    "1982-04-30",
    "11-Jul-1998",
    "05-Aug-2003",
    "23-Mar-1984",
    "14-Oct-1979",
    "02-Jan-1995",
    "27-Jun-1990",
    "30-Nov-1972",
    "08-Feb-1988",
    "15/03/1985",
    "22/07/1991",
    "31/12/1999",
    "13/06/2004",
    "28/02/1977",
    "19/09/1982",
    "07/04/1990",
    "1992-11-03",
    "1987-02-21",
    "22-Sep-1979",
    "30-Jan-1983",
];

struct Values {
    name: String,
    name2: String,
    addr: String,
    date: String,
    date2: String,
    email: String,
    phone: String,
    acct: String,
    url: String,
    secret: String,
}

fn name(rng: &mut ChaCha8Rng, l: &SynthLocale) -> String {
    let given = l.given.choose(rng).unwrap();
    let family = l.family.choose(rng).unwrap();
    match l.order {
        NameOrder::GivenFirst => format!("{given} {family}"),
        NameOrder::FamilyFirst => format!("{family}{given}"),
    }
}

fn address(rng: &mut ChaCha8Rng, l: &SynthLocale) -> String {
    let city = l.cities.choose(rng).unwrap();
    match l.tag {
        "en_US" => format!(
            "{} {} {}, {city}",
            rng.random_range(10..9990),
            l.streets.choose(rng).unwrap(),
            l.street_types.choose(rng).unwrap()
        ),
        "en_IN" => format!(
            "{} {} {}, {city}",
            rng.random_range(1..300),
            l.streets.choose(rng).unwrap(),
            l.street_types.choose(rng).unwrap()
        ),
        "de_DE" => format!(
            "{}{} {}, {city}",
            l.streets.choose(rng).unwrap(),
            l.street_types.choose(rng).unwrap(),
            rng.random_range(1..120)
        ),
        "es_MX" => format!(
            "{} {} {}, {city}",
            l.street_types.choose(rng).unwrap(),
            l.streets.choose(rng).unwrap(),
            rng.random_range(1..2500)
        ),
        "ja_JP" => format!(
            "{city}{}{}-{}-{}",
            l.towns.choose(rng).unwrap(),
            rng.random_range(1..8),
            rng.random_range(1..25),
            rng.random_range(1..15)
        ),
        _ => format!(
            "{city}{}{}{}号",
            l.towns.choose(rng).unwrap(),
            l.streets.choose(rng).unwrap(),
            rng.random_range(1..400)
        ),
    }
}

fn date(rng: &mut ChaCha8Rng, l: &SynthLocale) -> String {
    let total: u32 = l.dates.iter().map(|(_, w)| w).sum();
    loop {
        let mut x = rng.random_range(0..total);
        let style = l
            .dates
            .iter()
            .find(|(_, w)| {
                let hit = x < *w;
                x = x.saturating_sub(*w);
                hit
            })
            .map(|(s, _)| *s)
            .unwrap();
        let (y, m, dd) = (rng.random_range(1945..2012), rng.random_range(1..=12usize), rng.random_range(1..=28usize));
        let s = match style {
            DateStyle::MdySlash => format!("{m:02}/{dd:02}/{y}"),
            DateStyle::YmdDash => format!("{y}-{m:02}-{dd:02}"),
            DateStyle::DmyDashMon => format!("{dd:02}-{}-{y}", MONTHS[m - 1]),
            DateStyle::DmySlash => format!("{dd:02}/{m:02}/{y}"),
            DateStyle::Long => format!("{} {dd}, {y}", MONTHS_LONG[m - 1]),
            DateStyle::Dotted => format!("{dd:02}.{m:02}.{y}"),
            DateStyle::Kanji => format!("{y}年{m}月{dd}日"),
        };
        if !RESERVED_DATES.contains(&s.as_str()) {
            return s;
        }
    }
}

fn ascii_part(rng: &mut ChaCha8Rng, l: &SynthLocale, from_given: bool) -> String {
    if l.romaji.is_empty() {
        let pool = if from_given { l.given } else { l.family };
        pool.choose(rng).unwrap().to_lowercase()
    } else {
        l.romaji.choose(rng).unwrap().to_string()
    }
}

fn values(rng: &mut ChaCha8Rng, l: &SynthLocale) -> Values {
    let name = name(rng, l);
    let mut name2 = self::name(rng, l);
    while name2 == name {
        name2 = self::name(rng, l);
    }
    let date = date(rng, l);
    let mut date2 = self::date(rng, l);
    while date2 == date {
        date2 = self::date(rng, l);
    }
    let email = format!(
        "{}_{}{}@{}",
        ascii_part(rng, l, true),
        ascii_part(rng, l, false),
        rng.random_range(1..1000),
        l.domains.choose(rng).unwrap()
    );
    let url = format!(
        "https://{}.{}.{}/u/{}",
        URL_HOSTS.choose(rng).unwrap(),
        URL_WORDS.choose(rng).unwrap(),
        l.tld,
        d(rng, 6)
    );
    let secret = if rng.random_bool(0.5) {
        let body: String = (0..32).map(|_| char::from(*HEX.choose(rng).unwrap())).collect();
        format!("tok_{body}")
    } else {
        let body: String = (0..16).map(|_| char::from(*ALNUM_UPPER.choose(rng).unwrap())).collect();
        format!("AKIA{body}")
    };
    Values {
        name,
        name2,
        addr: address(rng, l),
        date,
        date2,
        email,
        phone: (l.phone)(rng),
        acct: nd(rng, 10),
        url,
        secret,
    }
}

/// A `Key: {slot}` line; one key variant is chosen per document.
struct Field {
    keys: &'static [&'static str],
    slot: &'static str,
}

struct Template {
    titles: &'static [&'static str],
    fields: &'static [Field],
    /// Closing sentences; one or two are used.
    prose: &'static [&'static str],
}

const fn f(keys: &'static [&'static str], slot: &'static str) -> Field {
    Field { keys, slot }
}

const PERSON_KEYS: &[&str] = &["Name", "Full name", "Customer", "Client"];
const ADDR_KEYS: &[&str] = &["Address", "Mailing address", "Street address", "Residence"];
const DATE_KEYS: &[&str] = &["Date", "Issued", "Date of issue", "As of"];
const EMAIL_KEYS: &[&str] = &["Email", "E-mail", "Contact email", "Notices to"];
const PHONE_KEYS: &[&str] = &["Phone", "Telephone", "Contact number", "Call"];
const ACCT_KEYS: &[&str] = &["Account number", "Account no.", "Reference number", "ID"];
const URL_KEYS: &[&str] = &["Website", "Portal", "Online", "Link"];
const SECRET_KEYS: &[&str] = &["Access token", "API key", "Login key", "Credential"];

const TEMPLATE_DEFS: [Template; 7] = [
    Template {
        titles: &["Form 1099-MISC Miscellaneous Income", "1099-MISC Statement for Recipients", "Form 1099 Copy B"],
        fields: &[
            f(&["Recipient", "Recipient name", "Payee"], "{name}"),
            f(&["Recipient address", "Payee address"], "{addr}"),
            f(&["Recipient TIN", "Payee account number"], "{acct}"),
            f(&["Statement date", "Issued on"], "{date}"),
            f(&["Payer telephone", "Payer contact"], "{phone}"),
            f(&["Electronic copy sent to", "Recipient email"], "{email}"),
        ],
        prose: &[
            "{name}, keep this copy for your records.",
            "Amounts in box 3 are reported to the tax authority.",
            "This form was furnished to {name} under the applicable reporting rules.",
            "If a correction is needed, contact the payer before filing.",
        ],
    },
    Template {
        titles: &["W-2 Wage and Tax Statement", "Form W-2 Employee Copy", "Annual Wage Statement"],
        fields: &[
            f(&["Employee", "Employee name"], "{name}"),
            f(&["Employee address", "Home address"], "{addr}"),
            f(&["Employee number", "Personnel ID"], "{acct}"),
            f(&["Date of issue", "Prepared on"], "{date}"),
            f(&["Prepared by", "Payroll contact"], "{name2}"),
            f(&["Duplicate forms", "Download at"], "{url}"),
            f(&["Payroll email", "Questions to"], "{email}"),
        ],
        prose: &[
            "Copy B is to be filed with the federal return of {name}.",
            "{name2} can answer questions about withholding.",
            "Box 12 codes are explained on the back of this form.",
            "Report any discrepancy to the payroll office within 30 days.",
        ],
    },
    Template {
        titles: &["Auto Insurance Policy Declarations", "Vehicle Coverage Summary", "Auto Policy Renewal Notice"],
        fields: &[
            f(&["Policyholder", "Named insured", "Insured"], "{name}"),
            f(&["Garaging address", "Vehicle location"], "{addr}"),
            f(&["Policy number", "Policy no."], "{acct}"),
            f(&["Effective date", "Coverage begins"], "{date}"),
            f(&["Agent phone", "Claims line"], "{phone}"),
            f(&["Claims mailbox", "Agent email"], "{email}"),
            f(&["Manage online", "Policy portal"], "{url}"),
        ],
        prose: &[
            "Dear {name}, thank you for insuring your vehicle with us.",
            "Coverage limits are listed on the following page.",
            "{name} is listed as the primary driver on this policy.",
            "Keep proof of insurance in the vehicle at all times.",
        ],
    },
    Template {
        titles: &["Monthly Account Statement", "Checking Account Summary", "Bank Statement"],
        fields: &[
            f(&["Account holder", "Primary owner"], "{name}"),
            f(&["Mailing address", "Statement address"], "{addr}"),
            f(&["Account number", "Account no."], "{acct}"),
            f(&["Statement date", "Period ending"], "{date}"),
            f(&["Online banking", "Sign in at"], "{url}"),
            f(&["API access token", "Developer key"], "{secret}"),
            f(&["Customer service", "Call us"], "{phone}"),
        ],
        prose: &[
            "{name}, please review all transactions and report discrepancies within 60 days.",
            "Interest is credited on the last business day of the month.",
            "Overdraft protection is available for eligible accounts.",
            "A copy of this statement was prepared for {name}.",
        ],
    },
    Template {
        titles: &["INVOICE", "Tax Invoice", "Invoice and Payment Request"],
        fields: &[
            f(&["Bill to", "Sold to", "Customer"], "{name}"),
            f(&["Billing address", "Ship to"], "{addr}"),
            f(&["Invoice date", "Issued"], "{date}"),
            f(&["Payment due", "Due by"], "{date2}"),
            f(&["Contact", "Billing email"], "{email}"),
            f(&["Phone", "Accounts line"], "{phone}"),
            f(&["Pay online at", "Payment link"], "{url}"),
        ],
        prose: &[
            "Thank you for your business, {name}.",
            "Late payments accrue a fee of 1.5% per month.",
            "Please include the invoice number with your payment.",
            "Goods remain our property until paid in full.",
        ],
    },
    Template {
        titles: &["Mortgage Insurance Disclosure", "Private Mortgage Insurance Notice", "Loan Insurance Statement"],
        fields: &[
            f(&["Borrower", "Primary borrower"], "{name}"),
            f(&["Co-borrower", "Second borrower"], "{name2}"),
            f(&["Property address", "Subject property"], "{addr}"),
            f(&["Loan number", "Loan no."], "{acct}"),
            f(&["Closing date", "Funded on"], "{date}"),
            f(&["Servicer notices", "Servicing email"], "{email}"),
        ],
        prose: &[
            "{name} and {name2} acknowledge that premiums are due monthly.",
            "Coverage may be cancelled once the balance falls below 78% of the original value.",
            "This disclosure is provided to {name} as required by law.",
            "Keep this notice with your loan documents.",
        ],
    },
    Template {
        titles: &["Earnings Statement", "Pay Stub", "Payroll Advice"],
        fields: &[
            f(&["Employee", "Paid to"], "{name}"),
            f(&["Home address", "Address on file"], "{addr}"),
            f(&["Pay date", "Paid on"], "{date}"),
            f(&["Employee number", "Badge ID"], "{acct}"),
            f(&["Deposit advice sent to", "Employee email"], "{email}"),
            f(&["Self-service login key", "Portal credential"], "{secret}"),
        ],
        prose: &[
            "Net pay has been deposited for {name}.",
            "Retain this statement for your records.",
            "Year-to-date totals include all pay periods this year.",
            "Questions about deductions can be sent to the payroll office.",
        ],
    },
];

const EXTRA_KEYS: &[(&str, &[&str])] = &[
    ("Status", &["Active", "Pending", "Closed", "Paid", "Overdue", "Processed"]),
    ("Currency", &["USD", "EUR", "MXN", "INR", "JPY", "CNY"]),
    ("Plan", &["Standard", "Premium", "Basic", "Gold", "Essential"]),
    ("Branch", &["Downtown", "Northside", "Harbor", "Central", "Riverside"]),
    ("Department", &["Accounts Payable", "Human Resources", "Claims", "Underwriting", "Payroll"]),
    ("Payment method", &["Direct deposit", "Check", "Wire transfer", "Card"]),
    ("Coverage", &["Liability", "Collision", "Comprehensive", "Full"]),
    ("Page", &["1 of 1", "1 of 2", "2 of 2"]),
    ("Category", &["Services", "Retail", "Consulting", "Maintenance"]),
];
const AMOUNT_KEYS: &[&str] = &["Amount due", "Balance", "Total", "Net pay", "Premium", "Gross wages"];

/// `count` non-PII lines with distinct keys.
fn extra_lines(rng: &mut ChaCha8Rng, count: usize) -> Vec<String> {
    let mut keys: Vec<usize> = (0..EXTRA_KEYS.len() + 1).collect();
    keys.shuffle(rng);
    keys.truncate(count);
    keys.into_iter()
        .map(|k| match EXTRA_KEYS.get(k) {
            Some((key, values)) => format!("{key}: {}", values.choose(rng).unwrap()),
            None => {
                let key = AMOUNT_KEYS.choose(rng).unwrap();
                format!("{key}: {}.{:02}", rng.random_range(20..9000), rng.random_range(0..100))
            }
        })
        .collect()
}

fn slot_value<'a>(slot: &str, v: &'a Values) -> (Label, &'a str) {
    match slot {
        "{name}" => (Label::Person, &v.name),
        "{name2}" => (Label::Person, &v.name2),
        "{addr}" => (Label::Address, &v.addr),
        "{date}" => (Label::Date, &v.date),
        "{date2}" => (Label::Date, &v.date2),
        "{email}" => (Label::Email, &v.email),
        "{phone}" => (Label::Phone, &v.phone),
        "{acct}" => (Label::Account, &v.acct),
        "{url}" => (Label::Url, &v.url),
        "{secret}" => (Label::Secret, &v.secret),
        other => unreachable!("unknown slot {other}"),
    }
}

fn generic_key(slot: &str) -> &'static [&'static str] {
    match slot {
        "{name}" | "{name2}" => PERSON_KEYS,
        "{addr}" => ADDR_KEYS,
        "{date}" | "{date2}" => DATE_KEYS,
        "{email}" => EMAIL_KEYS,
        "{phone}" => PHONE_KEYS,
        "{acct}" => ACCT_KEYS,
        "{url}" => URL_KEYS,
        _ => SECRET_KEYS,
    }
}

/// Renders a template: a title, the PII fields in shuffled order with a
/// few non-PII fields mixed in, then one or two closing sentences.
fn render(rng: &mut ChaCha8Rng, template: usize, v: &Values) -> (String, Vec<(Label, String)>) {
    let t = &TEMPLATE_DEFS[template];
    let mut lines: Vec<String> = Vec::new();
    for field in t.fields {
        // mostly the template's own wording, sometimes a generic key
        let keys = if rng.random_bool(0.8) { field.keys } else { generic_key(field.slot) };
        lines.push(format!("{}: {}", keys.choose(rng).unwrap(), field.slot));
    }
    let extras = rng.random_range(2..=4);
    lines.extend(extra_lines(rng, extras));
    lines.shuffle(rng);
    let mut prose: Vec<&str> = t.prose.to_vec();
    prose.shuffle(rng);
    let closing = prose[..rng.random_range(1..=2)].join(" ");
    let title = t.titles.choose(rng).unwrap();
    let mut text = format!("{title}\n{}\n{closing}", lines.join("\n"));

    let mut used = Vec::new();
    for field in t.fields {
        let (label, value) = slot_value(field.slot, v);
        used.push((label, value.to_string()));
    }
    for marker in
        ["{name2}", "{name}", "{addr}", "{date2}", "{date}", "{email}", "{phone}", "{acct}", "{url}", "{secret}"]
    {
        if text.contains(marker) {
            text = text.replace(marker, slot_value(marker, v).1);
        }
    }
    (text, used)
}

/// Deterministic corpus of `n` documents.
pub fn synth_corpus(n: usize, seed: u64, mix: &LocaleMix) -> Vec<CorpusRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let tag = mix.pick(&mut rng).to_string();
            let locale = LOCALES.iter().find(|l| l.tag == tag).expect("mix tags are validated");
            let t = rng.random_range(0..TEMPLATES.len());
            let v = values(&mut rng, locale);
            let (text, used) = render(&mut rng, t, &v);
            let mut pii_gt: BTreeMap<Label, Vec<String>> = BTreeMap::new();
            for (label, value) in used {
                pii_gt.entry(label).or_default().push(value);
            }
            CorpusRecord {
                id: format!("synth-{seed}-{i:05}"),
                text,
                locale: tag,
                template: TEMPLATES[t].to_string(),
                pii_gt,
            }
        })
        .collect()
}
