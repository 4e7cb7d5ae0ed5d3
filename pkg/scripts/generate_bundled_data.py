"""Generate the bundled data files: a 1,000-row census-schema surname sample
and a first-name gender dictionary.

The sample is synthetic but schema-faithful: six percentage columns, "(S)"
suppression markers, rank/count fields, uppercase names. High-margin real
surnames (WASHINGTON, NGUYEN, ...) carry percentages close to their published
values so argmax labels match the real data. A set of filler names packs
otherwise-missing character bigrams so the training vocabulary lands in the
hundreds even on a 1,000-name sample; each filler chain is emitted twice with
different padding so both split halves see its bigrams.

Run from the repo root:  python3 scripts/generate_bundled_data.py
"""

from __future__ import annotations

import csv
import random
from pathlib import Path

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "sourceaudit" / "data"

# Surnames that are majority-white in the census, plus common anglo/european names.
WHITE_NAMES = """
smith miller johnson anderson taylor moore clark walker wright hall allen young king
scott green baker adams nelson hill campbell mitchell roberts carter phillips evans
turner parker edwards collins stewart morris murphy cook rogers reed bailey bell cox
howard ward peterson gray watson brooks kelly price bennett wood barnes ross henderson
coleman jenkins perry powell long hughes butler foster bryant russell
griffin hayes myers sullivan wallace west cole owens reynolds fisher ellis harrison
gibson mcdonald marshall murray freeman wells webb simpson stevens tucker
porter hunter hicks crawford henry boyd mason kennedy warren dixon shaw holmes
rice robertson hunt black daniels palmer mills nichols grant knight ferguson rose
stone hawkins dunn perkins hudson spencer gardner stephens payne pierce berry matthews
arnold wagner willis ray watkins olson carroll duncan snyder hart cunningham bradley
lane andrews harper fox riley armstrong carpenter weaver greene lawrence elliott
sims austin peters kelley franklin lawson fields ryan schmidt carr
wheeler chapman oliver montgomery richards williamson johnston banks meyer bishop
mccoy howell morrison hansen harvey little burton stanley
newman craig lowe barrett keller bauer schneider hoffman schultz mueller zimmerman
frank fischer weber krause lang hartman shoemaker ackerman eberhardt oconnell
fitzgerald macdonald mcallister whitfield underwood strickland huddleston satterfield
obrien oconnor gallagher donnelly sweeney flanagan costello brennan doyle quinn
nolan burke callahan delaney dempsey driscoll farrell hogan keegan kinsella
lynch madigan maguire mcbride mccarthy mcdermott mcgee mcgrath mckenna mcmahon
mcnamara moran mulligan murtagh nugent rafferty regan rourke shannon whelan
romano ricci esposito lombardi moretti bianchi colombo ferrari gallo greco
marino rizzo russo serra vitale deluca difranco digiovanni santoro palumbo
kowalski nowak wisniewski zielinski szymanski wojcik kaminski lewandowski
dabrowski kozlowski jankowski mazur krawczyk piotrowski grabowski
novak dvorak svoboda prochazka kucera horak nemec pokorny marek jelinek
johansson lindqvist bergstrom lundgren nilsson eriksson larsson olsson
pettersson gustafsson berglund sandberg sjoberg engstrom hendricks vandenberg
vanderpool vanhorn devries dejong visser mulder bakker dekker smit
schroeder kuhn lorenz brandt haas busch vogel friedrich gunther kaiser
thompson robinson harris lewis martin white lee walsh graham wallace
blair boone bowen brady briggs brock buckley burgess burns byrd cain
calhoun cannon cantrell carson chandler chase church clay clements cobb
combs conner conway cooley cooper copeland cotton craft crane crosby
dalton daugherty davenport dawson decker dennis dodson donovan dougherty
downs drake dudley duffy dunlap eaton elkins emerson england english
farmer farragut faulkner finley fleming fletcher flynn forbes fowler
frazier french frost fuller gaines gentry gibbs gilbert gilmore glover
goodman goodwin gould grady graves guthrie hale haley hamilton hammond
hampton hancock hanna hardin harmon harrell hartley hatfield heath
hebert hensley herring hess hester hickman hinton hodges holden holland
holloway holt hooper hopkins horne horton house houston hubbard huber
huff hull hurley hurst hutchinson ingram irwin jarvis jennings jewell
joyce kane keith kemp kendall kent kerr kidd kirby kirk knapp lamb
lambert lancaster landry langley larkin larson leach leblanc leonard
lester levine lindsey livingston locke logan lovell lucas lyons maddox
mahoney malone mann manning marks marsh mathis maxwell mayer maynard
mcclain mccormick mccullough mcdowell mcfarland mcgowan mcintyre mckay
mckee mcknight mclaughlin mclean mcmillan mcneil meadows mercer meredith
merrill meyers middlebrook milligan moody mooney morgan morrow morton
moseley moss mott mullins nash neal newton nixon noble norman
norris norton odell odonnell oliphant olsen oneal oneill orr osborne
packard paget parrish patton paxton pearce pearson petty
phelps pickett pittman platt poole pope porterfield potts pratt prescott
preston prince pruitt purcell queen quigley raines ramsey randall
rankin ratliff rawlings raymond reece reeves rhodes richmond riddle
roach robbins roberson rollins rowland rucker rushing rutherford
sampson sanborn sargent savage sawyer schaefer schafer schmitt schwartz
sellers sexton shaffer sharpe shea sheldon shepard sheppard sherman
shields short simmons skinner slater sloane snider snow
sparks spears stafford stanton stark steele stein sterling stevenson
stokes stout strong stuart summers sutton sweet talley tanner tate
terrell thornton tillman tipton tobin todd townsend tracy trent
tuttle tyler underhill upton vance vaughan vaughn vincent wade waller
walton ware warner waters weeks welch whitaker whitehead
whitley whitman whitney wiggins wilcox wilder wiley wilkerson wilkins
willoughby winters wise wolfe woodard woodruff woods wooten workman
wyatt yates yoder yost
""".split()

HISPANIC_NAMES = """
garcia rodriguez martinez hernandez lopez gonzalez perez sanchez ramirez torres
rivera gutierrez ortiz morales reyes diaz mendoza aguilar vargas castro romero
soto alvarado delgado pena rios guzman salazar juarez espinoza cabrera cardenas
carrillo fuentes velasquez rojas ibarra acosta zavala cisneros arellano quintero
rosales cervantes villarreal trevino barajas zuniga mejia najera ontiveros paredes
saucedo renteria huerta montes esparza valdez orozco palacios bustamante olvera
galindo alcaraz almanza amaya anaya aparicio aranda arevalo armendariz arriaga
avalos ayala badillo bahena balderas banuelos barragan barrera barrientos batista
becerra beltran benavides bermudez bonilla burgos bustos caballero calderon camacho
campos canales cano cantu cardona carbajal casillas castaneda cazares ceja
chavarria chavez colunga contreras cordova corona coronado cortez covarrubias
cuellar davila delacruz delatorre deleon dominguez duarte elizondo enriquez
escamilla escobar escobedo esquivel estrada farias figueroa flores fonseca franco
frias gaitan galvan galvez gamboa gaona garibay garrido gastelum gaytan godinez
granados guajardo guardado guerra guerrero guillen gurrola guzman haro herrera
hinojosa holguin hurtado infante jaramillo jasso jimenez laredo leyva limon
llamas longoria lozano lucero lugo macias madrigal magana maldonado
marin marquez marroquin matamoros medina melendez mendez meraz mercado meza
miramontes mireles mondragon monroy montalvo montemayor montoya mora moreno
munoz murillo naranjo nava navarrete negrete nieto nunez ocampo ochoa ojeda
olivares olivas orellana ornelas orona osorio pacheco padilla palomino pantoja
pedraza peralta perales pineda pinedo plascencia ponce porras portillo prado
puente pulido quezada quintanilla rangel rascon rendon renteria reyna rincon
riojas robles rocha rodarte rosas rubio saenz salas salcedo saldana salgado
salinas sandoval santana santiago sarabia segovia segura sepulveda serrano
sierra sosa sotelo suarez tafoya tamayo tapia tejada tellez terrazas tijerina
tirado toledo tovar urbina urena uribe valadez valdivia valencia valenzuela
vallejo varela vazquez vega vela velarde velez vera verduzco vidal villa
villagomez villalobos villanueva villegas yanez ybarra zamora zapata zaragoza
zarate zendejas zepeda
""".split()

API_NAMES = """
nguyen tran pham huynh hoang phan truong chen wang zhang kim park choi liu yang
wu huang lin patel shah singh kaur gupta sharma mehta desai vo dang bui duong
xiong vang thao yee fong leung chu cheng hsu kwan lam tsai yamamoto tanaka suzuki
watanabe nakamura kobayashi saito matsumoto fujita okada dinh doan lai luong luu
mai ngo nghiem phung quach ta thai trinh vuong banh chau chung dao diep giang
ha hong khuu kieu lieu ly mach nhan ong quan sam tang thach tieu to tong trang
trieu vinh vui xu yu zhao zhou zhu zheng zhuang xie xue yuan yao jiang shen
deng cao peng tian qian guo luo han feng hao hou jia kang kong lei liang
song sun tan wei wen xia yan ye yin su lu du pan bai cai chang chiang chou
chiu hsieh kuo liao lo lu ma shih sung tsao tseng weng yeh kwok lau mak mok
ng poon sit siu szeto tam wan yip yim yuen ahn bae baek bang byun cha cho
choe chun chung gang go gu gwon ha hahn han heo hwang im jang je jeon jeong
ji jin jo joo ju jun jung kang kwak kwon lim min moon nam noh oh paek paik
pak rhee roh ryu seo seong shim shin sohn son song suh yi yoo yoon youn yun
agarwal ahuja anand arora bajaj balakrishnan banerjee bhatt bhatia chandra
chandrasekaran chatterjee chaudhary chawla chopra dasgupta dutta ganesan garg
ghosh goel goyal iyer jain joshi kapoor kaul khanna krishnan kulkarni kumar
lal madan mahajan malhotra mathur menon mishra mittal mukherjee nair narayanan
pandey pillai prasad raghavan rajagopalan raman ramaswamy rao reddy saxena sethi
shankar shetty sinha srinivasan srivastava subramaniam sundaram suri tripathi
trivedi varma venkataraman verma vyas abe aoki endo fujii fujimoto fukuda goto
harada hasegawa hashimoto hayashi honda hoshino ikeda imai inoue ishida ishii
ito iwasaki kaneko kato kawaguchi kawasaki kikuchi kimura kinoshita kojima komatsu
kondo koyama kubo kudo maeda maruyama masuda matsuda matsui matsuo miura miyamoto
miyazaki mizuno mori morita murakami murata nagai naito nakagawa nakajima nakano
nakata nishida nishimura noguchi nomura oda ogawa ohashi oishi okamoto ono onishi
osawa otsuka ozawa sakai sakamoto sakurai sano sasaki sato shibata shimizu
""".split()

BLACK_NAMES = """
washington jefferson smalls gadson boykins fluellen diallo jeanbaptiste pierrelouis
okafor mensah osei toussaint baptiste manigault ravenell pinckney moultrie
vereen stackhouse hairston broadnax bethea leggett hosey spann mincey
blackshear pettway desir fortson merriweather singleton charleston francois etienne altidor fleurant
cadet dorvil exantus saintlouis delva compere ulysse petitfrere germain joseph
kone traore sesay kamara jalloh conteh turay koroma ceesay sowe jobe camara
adeyemi adewale okoro okonkwo chukwu eze nwosu obi ogunleye olawale oyelaran
abubakar asante boateng gyasi kwarteng nkrumah quaye sarpong tetteh yeboah
""".split()

AIAN_NAMES = """
begay yazzie benally tsosie manygoats whitehorse runningcrane goldtooth twohearts
yellowhair blackgoat roanhorse etsitty bitsilly claw keams chee todacheene haskie
attakai secatero cayaditto tapaha spottedhorse littlelight birdinground
""".split()

TWO_NAMES = """
kealoha kahananui mahelona keawe napualawa kaawa hokulani liufau taufa
aiona akana kahele tuiasosopo faleafine
""".split()

# First names for the gender dictionary. (name, female_count, male_count)
FEMALE_FIRST = """
mary patricia jennifer linda elizabeth barbara susan jessica sarah karen lisa nancy
betty margaret sandra ashley kimberly emily donna michelle carol amanda dorothy
melissa deborah stephanie rebecca sharon laura cynthia kathleen amy angela shirley
anna brenda pamela emma nicole helen samantha katherine christine debra rachel
carolyn janet catherine maria heather diane ruth julie olivia joyce virginia
victoria kelly lauren christina joan evelyn judith megan andrea cheryl hannah
jacqueline martha gloria teresa ann sara madison frances kathryn janice jean
abigail alice julia judy sophia grace denise amber doris marilyn danielle beverly
isabella theresa diana natalie brittany charlotte marie kayla alexis lori yvonne
elena priya rosa lucia ingrid mei aisha fatima keisha latoya imani nia zainab
jane nina tanya tina wendy gail paula vera iris carla monica renee holly dawn
linh mai thuy huong lan phuong anita meera lakshmi sunita yuki sakura hana
""".split()

MALE_FIRST = """
james robert john michael david william richard joseph thomas charles christopher
daniel matthew anthony mark donald steven paul andrew joshua kenneth kevin brian
george timothy ronald edward jason jeffrey ryan jacob gary nicholas eric jonathan
stephen larry justin scott brandon benjamin samuel gregory frank alexander raymond
patrick jack dennis jerry tyler aaron jose adam nathan henry douglas zachary peter
kyle ethan walter noah jeremy christian keith roger terry austin sean gerald carl
harold dylan arthur lawrence jordan jesse bryan billy bruce gabriel joe logan alan
juan albert wayne elijah randy roy vincent ralph eugene russell bobby philip louis
miguel carlos hiroshi wei rajesh omar demetrius jamal darnell tyrone kwame malik
marcus victor diego luis pedro felipe andres javier hector manuel ricardo
minh duc tuan hung anil sanjay vikram arjun kenji takeshi satoshi ahmed hassan
""".split()

# Near-even names must stay below the 0.9 ratio so lookups return "unknown".
NEUTRAL_FIRST = ["jordan", "taylor", "casey", "riley", "avery", "quinn", "morgan",
                 "skyler", "rowan", "sage", "dana"]
# "jordan" appears in MALE_FIRST too; the neutral entry below must win.
MALE_FIRST.remove("jordan")

ALPHABET = "abcdefghijklmnopqrstuvwxyz"
VOWELS = "aeiou"


def bigrams(name: str) -> set[str]:
    return {name[i:i + 2] for i in range(len(name) - 1)}


def missing_bigram_chains(covered: set[str], rng: random.Random) -> list[str]:
    """Pack every uncovered letter pair into greedy walk chains."""
    missing = {a + b for a in ALPHABET for b in ALPHABET} - covered
    out_edges: dict[str, list[str]] = {}
    for pair in sorted(missing):
        out_edges.setdefault(pair[0], []).append(pair[1])
    for letter in out_edges:
        rng.shuffle(out_edges[letter])
    chains = []
    while any(out_edges.values()):
        start = next(letter for letter in sorted(out_edges) if out_edges[letter])
        walk = [start]
        while out_edges.get(walk[-1]):
            walk.append(out_edges[walk[-1]].pop())
        chains.append("".join(walk))
    return chains


def chain_to_name(chain: str, rng: random.Random, max_len: int = 14) -> list[str]:
    """Split a chain into name-sized pieces, padding short ones with vowels.

    Pieces overlap by one letter so no bigram is lost at the seams.
    """
    pieces = []
    step = max_len - 1
    for start in range(0, max(len(chain) - 1, 1), step):
        piece = chain[start:start + max_len]
        while len(piece) < 4:
            piece += rng.choice(VOWELS)
        pieces.append(piece)
    return pieces


def build_filler_names(real_names: list[str], rng: random.Random) -> list[str]:
    covered = set()
    for name in real_names:
        covered |= bigrams(name)
    fillers: list[str] = []
    # Two independent packings so most filler bigrams appear in two names.
    for packing_seed in (101, 202):
        packer = random.Random(packing_seed)
        for chain in missing_bigram_chains(covered, packer):
            fillers.extend(chain_to_name(chain, packer))
    seen = set()
    unique = []
    for name in fillers:
        if name not in seen and name not in real_names:
            seen.add(name)
            unique.append(name)
    return unique


def pct_row(rng: random.Random, major: str, major_pct: float,
            suppress_small: bool = False) -> dict[str, str]:
    """Percentages with one dominant class; minor cells share the remainder."""
    columns = ["pctwhite", "pctblack", "pctapi", "pctaian", "pct2prace", "pcthispanic"]
    majors = {"white": "pctwhite", "black": "pctblack", "api": "pctapi",
              "aian": "pctaian", "two_or_more": "pct2prace", "hispanic": "pcthispanic"}
    major_col = majors[major]
    rest = 100.0 - major_pct
    minors = [c for c in columns if c != major_col]
    weights = [rng.random() for _ in minors]
    total_weight = sum(weights)
    row = {major_col: f"{major_pct:.2f}"}
    for col, weight in zip(minors, weights):
        value = rest * weight / total_weight
        if suppress_small and value < 1.0:
            row[col] = "(S)"
        else:
            row[col] = f"{value:.2f}"
    return row


def make_census_sample() -> list[dict[str, str]]:
    rng = random.Random(8142)

    # (label, candidate names, names kept, dominant-share range)
    groups = [
        ("white", WHITE_NAMES, 480, (86.0, 96.0)),
        ("hispanic", HISPANIC_NAMES, 130, (76.0, 94.0)),
        ("api", API_NAMES, 105, (80.0, 96.5)),
        ("black", BLACK_NAMES, 55, (58.0, 90.0)),
        ("aian", AIAN_NAMES, 22, (68.0, 90.0)),
        ("two_or_more", TWO_NAMES, 14, (40.0, 52.0)),
    ]
    # Published-percentage anchors for the high-margin examples.
    anchors = {"washington": ("black", 87.53), "jefferson": ("black", 75.24),
               "nguyen": ("api", 96.45), "garcia": ("hispanic", 92.03),
               "smith": ("white", 70.90), "begay": ("aian", 93.45)}

    taken: set[str] = set()
    real_names: list[str] = []
    rows: list[dict[str, str]] = []
    for label, names, target, (lo, hi) in groups:
        pool = sorted(set(names) - taken)
        anchored = [n for n in pool if n in anchors]
        rest = [n for n in pool if n not in anchors]
        chosen = anchored + rng.sample(rest, min(target - len(anchored), len(rest)))
        for name in chosen:
            taken.add(name)
            real_names.append(name)
            if name in anchors:
                anchor_label, anchor_pct = anchors[name]
                row = pct_row(rng, anchor_label, anchor_pct)
            else:
                row = pct_row(rng, label, rng.uniform(lo, hi),
                              suppress_small=rng.random() < 0.25)
            row["name"] = name.upper()
            rows.append(row)

    fillers = build_filler_names(real_names, rng)
    for name in fillers:
        if name in taken:
            continue
        taken.add(name)
        row = pct_row(rng, "white", rng.uniform(88.0, 95.0))
        row["name"] = name.upper()
        rows.append(row)

    while len(rows) < 1000:
        name = "".join(rng.choice("bcdfgklmnprstvw") + rng.choice(VOWELS)
                       for _ in range(rng.choice((3, 4))))
        if name in taken:
            continue
        taken.add(name)
        row = pct_row(rng, "white", rng.uniform(88.0, 95.0))
        row["name"] = name.upper()
        rows.append(row)
    rows = rows[:1000]

    rng.shuffle(rows)
    for rank, row in enumerate(rows, start=1):
        row["rank"] = str(rank)
        row["count"] = str(rng.randrange(2_000, 900_000))
    return rows


def write_census_sample(rows: list[dict[str, str]]) -> None:
    columns = ["name", "rank", "count", "pctwhite", "pctblack", "pctapi",
               "pctaian", "pct2prace", "pcthispanic"]
    with open(OUT_DIR / "census_sample.csv", "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=columns)
        writer.writeheader()
        writer.writerows(rows)


def write_gender_dictionary() -> None:
    rng = random.Random(929)
    rows = []
    for name in FEMALE_FIRST:
        female = rng.randrange(8_000, 90_000)
        male = int(female * rng.uniform(0.0, 0.08))
        rows.append((name, female, male))
    for name in MALE_FIRST:
        male = rng.randrange(8_000, 90_000)
        female = int(male * rng.uniform(0.0, 0.08))
        rows.append((name, female, male))
    for name in NEUTRAL_FIRST:
        base = rng.randrange(5_000, 20_000)
        other = int(base * rng.uniform(0.75, 1.0))
        female, male = (base, other) if rng.random() < 0.5 else (other, base)
        rows.append((name, female, max(male, 1)))
    rows.sort()
    with open(OUT_DIR / "gender_names.csv", "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["name", "female_count", "male_count"])
        writer.writerows(rows)


def main() -> None:
    rows = make_census_sample()
    write_census_sample(rows)
    write_gender_dictionary()
    print(f"census_sample.csv: {len(rows)} rows")
    names = [row["name"].lower() for row in rows]
    full_coverage = set()
    for name in names:
        full_coverage |= bigrams(name)
    print(f"distinct bigrams in full sample: {len(full_coverage)}")


if __name__ == "__main__":
    main()
