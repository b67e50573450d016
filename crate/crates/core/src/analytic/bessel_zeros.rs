// @generated by `cargo run -p sandwich-core --example gen_bessel_table`. Do not edit.

/// Positive zeros `j_(m,s)` of `J_m`, row `m`, column `s - 1`.
pub(crate) const J_ZEROS: [[f64; 30]; 11] = [
    [
        2.404825557695772,
        5.5200781102863115,
        8.653727912911013,
        11.791534439014281,
        14.930917708487787,
        18.071063967910924,
        21.21163662987926,
        24.352471530749305,
        27.493479132040257,
        30.634606468431976,
        33.77582021357357,
        36.917098353664045,
        40.05842576462824,
        43.19979171317674,
        46.341188371661815,
        49.48260989739782,
        52.62405184111499,
        55.765510755019974,
        58.90698392608094,
        62.048469190227166,
        65.18996480020687,
        68.33146932985679,
        71.47298160359372,
        74.61450064370183,
        77.75602563038805,
        80.89755587113763,
        84.0390907769382,
        87.18062984364116,
        90.32217263721049,
        93.46371878194478,
    ],
    [
        3.831705970207512,
        7.015586669815619,
        10.173468135062723,
        13.323691936314223,
        16.47063005087763,
        19.615858510468243,
        22.760084380592772,
        25.903672087618382,
        29.046828534916855,
        32.189679910974405,
        35.33230755008387,
        38.47476623477162,
        41.61709421281445,
        44.75931899765283,
        47.90146088718545,
        51.04353518357151,
        54.18555364106132,
        57.327525437901016,
        60.46945784534749,
        63.61135669848123,
        66.75322673409849,
        69.89507183749578,
        73.03689522557383,
        76.17869958464146,
        79.3204871754763,
        82.46225991437356,
        85.60401943635023,
        88.7457671449263,
        91.88750425169499,
        95.0292318080447,
    ],
    [
        5.135622301840682,
        8.417244140399866,
        11.619841172149059,
        14.79595178235126,
        17.959819494987826,
        21.116997053021848,
        24.2701123135731,
        27.42057354998456,
        30.569204495516395,
        33.71651950922271,
        36.86285651128381,
        40.008446733478195,
        43.15345377837146,
        46.297996677236924,
        49.44216411041687,
        52.58602350681596,
        55.72962705320114,
        58.87301577261216,
        62.01622235921765,
        65.1592731907578,
        68.30218978418347,
        71.44498986635784,
        74.5876881736024,
        77.73029705697891,
        80.87282694624477,
        84.01528670954616,
        87.15768393520335,
        90.30002515459293,
        93.44231602001113,
        96.58456144778322,
    ],
    [
        6.380161895923983,
        9.76102312998167,
        13.015200721698434,
        16.22346616031877,
        19.40941522643501,
        22.58272959310444,
        25.748166699294977,
        28.908350780921758,
        32.0648524070977,
        35.218670738610115,
        38.37047243475695,
        41.52071967040678,
        44.669743116617255,
        47.8177856915333,
        50.96502990620519,
        54.11161556982188,
        57.25765160449902,
        60.403224138472126,
        63.5484021785672,
        66.69324166737269,
        69.83778843790435,
        72.98208040043201,
        76.1261491847741,
        79.27002139005586,
        82.41371954726787,
        85.55726286883001,
        88.70066783822207,
        91.84394867814709,
        94.98711772546562,
        98.1301857338749,
    ],
    [
        7.588342434503804,
        11.064709488501187,
        14.372536671617588,
        17.615966049804832,
        20.826932956962388,
        24.01901952477111,
        27.199087765981254,
        30.371007667117247,
        33.53713771181923,
        36.699001128744655,
        39.85762730218089,
        43.013737723354424,
        46.16785351292438,
        49.32036068639027,
        52.47155139845802,
        55.62165090976798,
        58.77083574045925,
        61.9192462040977,
        65.06699525569556,
        68.21417486146706,
        71.36086066529799,
        74.50711546139641,
        77.65299181534343,
        80.79853406792373,
        83.94377988509808,
        87.08876146981359,
        90.23350651879235,
        93.37803898484893,
        96.52237968938121,
        99.66654681832884,
    ],
    [
        8.771483815959954,
        12.338604197466942,
        15.700174079711672,
        18.980133875179924,
        22.217799896561267,
        25.430341154222702,
        28.62661830729114,
        31.811716724047763,
        34.9887812945593,
        38.15986856196713,
        41.3263832540474,
        44.48931912321967,
        47.64939980669706,
        50.807165203006335,
        53.96302655837815,
        57.11730278150425,
        60.2702450729428,
        63.42205404587577,
        66.57289188711826,
        69.72289116171675,
        72.87216129691203,
        76.0207934305916,
        79.1688640870874,
        82.3164379990123,
        85.4635702983731,
        88.61030823579625,
        91.75669254250613,
        94.90275851888956,
        98.04853691169518,
        101.19405462630897,
    ],
    [
        9.936109524217684,
        13.589290170541219,
        17.00381966781601,
        20.320789213566506,
        23.58608443558139,
        26.820151983411407,
        30.033722386570467,
        33.23304176284712,
        36.42201966825846,
        39.6032394160754,
        42.7784816131995,
        45.9490159980426,
        49.11577372476427,
        52.27945390360105,
        55.44059206885315,
        58.59960563123768,
        61.75682490187681,
        64.91251478472074,
        68.06689026803872,
        71.22012769616839,
        74.37237310862434,
        77.52374850242347,
        80.67435659867928,
        83.8242845153919,
        86.97360662919584,
        90.12238682807623,
        93.27068030141393,
        96.41853497477823,
        99.56599266924391,
        102.71309004513648,
    ],
    [
        11.086370019245084,
        14.82126872701317,
        18.287582832481725,
        21.641541019848397,
        24.93492788767302,
        28.1911884594832,
        31.422794192265577,
        34.637089352069324,
        37.838717382853616,
        41.03077369158554,
        44.21540850526125,
        47.39416575557051,
        50.568184679795564,
        53.738325371963285,
        56.90524999197878,
        60.069476998277,
        63.23141836888827,
        66.39140575953297,
        69.54970927242226,
        72.70655117247713,
        75.8621160763224,
        79.01655863292243,
        82.17000939052792,
        85.32257933237952,
        88.47436342186671,
        91.62544340141392,
        94.77589002267663,
        97.92576483879793,
        101.07512165612866,
        104.22400771876028,
    ],
    [
        12.225092264004655,
        16.03777419088771,
        19.554536430997054,
        22.94517313187462,
        26.266814641176644,
        29.545659670998553,
        32.795800037341465,
        36.025615063869566,
        39.24044799517813,
        42.443887743273564,
        45.63844418219914,
        48.82593038155386,
        52.0076914566869,
        55.18474793928905,
        58.3578890252697,
        61.527735166816,
        64.69478123581868,
        67.85942699300077,
        71.0219990406205,
        74.18276692765278,
        77.34195515679602,
        80.49975226633171,
        83.65631778956168,
        86.81178765126711,
        89.96627839757531,
        93.11989054433235,
        96.27271125186596,
        99.42481647963888,
        102.57627273545339,
        105.72713850577799,
    ],
    [
        13.35430047743533,
        17.241220382489125,
        20.80704778926411,
        24.23388525775055,
        27.583748963573008,
        30.885378967696674,
        34.154377923855094,
        37.400099977156586,
        40.628553718964525,
        43.84380142033734,
        47.04870073765403,
        50.24532695530539,
        53.435227157042064,
        56.619580266508436,
        59.79930163096023,
        62.9751135342416,
        66.14759402479598,
        69.31721151789509,
        72.48434981747306,
        75.64932653606084,
        78.81240687196421,
        81.97381406180554,
        85.13373741333916,
        88.29233855113219,
        91.4497563246344,
        94.60611070285768,
        97.76150589270782,
        100.91603285644376,
        104.06977135966201,
        107.22279164924313,
    ],
    [
        14.47550068655454,
        18.43346366696658,
        22.046985364697804,
        25.509450554182827,
        28.887375063530456,
        32.21185619971273,
        35.499909205373854,
        38.76180701788165,
        42.0041902366718,
        45.23157410353504,
        48.4471513872694,
        51.653251668165865,
        54.85161907596334,
        58.04358792823248,
        61.230197977292676,
        64.41227241292435,
        67.59047207369846,
        70.76533399624279,
        73.93729938176807,
        77.1067342468613,
        80.27394491398516,
        83.43918979610575,
        86.6026884767276,
        89.76462878717908,
        92.92517238116841,
        96.08445916814543,
        99.24261087041924,
        102.3997339006155,
        105.55592170699714,
        108.7112566985254,
    ],
];

/// Positive zeros `j'_(m,s)` of `J'_m`, row `m`, column `s - 1`. The trivial
/// zero of `J'_0` at the origin is not listed.
pub(crate) const JP_ZEROS: [[f64; 30]; 11] = [
    [
        3.831705970207512,
        7.015586669815619,
        10.173468135062723,
        13.323691936314223,
        16.47063005087763,
        19.615858510468243,
        22.760084380592772,
        25.903672087618382,
        29.046828534916855,
        32.189679910974405,
        35.33230755008387,
        38.47476623477162,
        41.61709421281445,
        44.75931899765283,
        47.90146088718545,
        51.04353518357151,
        54.18555364106132,
        57.327525437901016,
        60.46945784534749,
        63.61135669848123,
        66.75322673409849,
        69.89507183749578,
        73.03689522557383,
        76.17869958464146,
        79.3204871754763,
        82.46225991437356,
        85.60401943635023,
        88.7457671449263,
        91.88750425169499,
        95.0292318080447,
    ],
    [
        1.8411837813406589,
        5.331442773525032,
        8.536316366346284,
        11.706004902592063,
        14.863588633909032,
        18.0155278626818,
        21.16436985918879,
        24.311326857210773,
        27.45705057105925,
        30.601922972669094,
        33.746182898667385,
        36.88998740923681,
        40.03344405335068,
        43.17662896544883,
        46.31959756117391,
        49.46239113970276,
        52.60504111155669,
        55.74757179225101,
        58.89000229918571,
        62.032347870661994,
        65.17462080254444,
        68.31683112595181,
        71.45898710585101,
        74.60109561345641,
        77.74316240819675,
        80.88519235387844,
        84.02718958629353,
        87.16915764454026,
        90.31109957490341,
        93.45301801376002,
    ],
    [
        3.05423692822714,
        6.706133194158459,
        9.969467823087594,
        13.170370856016124,
        16.347522318321786,
        19.512912782488208,
        22.671581772477424,
        25.826037141785264,
        28.977672772993678,
        32.127327020443474,
        35.27553505067469,
        38.42265481755591,
        41.568934936074314,
        44.714553532819735,
        47.85964160799209,
        51.00429767245886,
        54.148597242671244,
        57.29259918642822,
        60.43635007525356,
        63.579887238154626,
        66.7232409477173,
        69.8664360133377,
        73.00949296117147,
        76.15242892075901,
        79.2952583000565,
        82.43799330556021,
        85.58064434748778,
        88.72322035861043,
        91.86572904747763,
        95.00817710126768,
    ],
    [
        4.201188941210528,
        8.015236598375953,
        11.345924310743008,
        14.585848286167028,
        17.788747866066473,
        20.972476936537703,
        24.144897432909268,
        27.31005793020435,
        30.470268806290427,
        33.62694918279668,
        36.78102067546439,
        39.93310862365949,
        43.08365266237507,
        46.23297108183648,
        49.38130009237035,
        52.52881873720928,
        55.67566523350271,
        58.82194800159502,
        61.967753296514445,
        65.11315060495681,
        68.25819653653417,
        71.40293767819676,
        74.54741272078061,
        77.69165406561132,
        80.83568905380955,
        83.97954091786679,
        87.12322952609736,
        90.26677197076214,
        93.41018303689464,
        96.55347557915687,
    ],
    [
        5.317553126083995,
        9.28239628524161,
        12.681908442638893,
        15.964107037731551,
        19.196028800048907,
        22.401032267689004,
        25.58975968138673,
        28.767836217666506,
        31.93853934097278,
        35.10391667734676,
        38.265316987088156,
        41.42366649850074,
        44.57962313735926,
        47.73366752386575,
        50.88615915318269,
        54.037372418083905,
        57.18752045984769,
        60.3367714022163,
        63.48525966965171,
        66.63309404679481,
        69.78036352584732,
        72.92714162052883,
        76.07348959690563,
        79.21945892611728,
        82.36509316951089,
        85.5104294439397,
        88.65549957254481,
        91.80033099715362,
        94.94494750804716,
        98.08936983241367,
    ],
    [
        6.415616375700241,
        10.51986087377231,
        13.987188630140299,
        17.312842487884623,
        20.575514521386886,
        23.803581476593862,
        27.01030789777772,
        30.202849078981657,
        33.38544390101012,
        36.56077768688036,
        39.73064023006742,
        42.89627316349441,
        46.05856627356704,
        49.21817461466664,
        52.37559152956359,
        55.531195884489165,
        58.68528359340738,
        61.83808922979466,
        64.98980119326939,
        68.1405725741757,
        71.29052907952374,
        74.4397749100115,
        77.58839718203237,
        80.73646929922006,
        83.88405355418163,
        87.03120315836293,
        90.17796384177831,
        93.32437512549734,
        96.47047134253654,
        99.61628246342846,
    ],
    [
        7.501266144684148,
        11.734935953042708,
        15.268181461097871,
        18.6374430096662,
        21.931715017802233,
        25.183925599499624,
        28.409776362510087,
        31.617875716105033,
        34.81339298429744,
        37.999640897715295,
        41.17884947432141,
        44.35257919907022,
        47.52195690576811,
        50.68781778172374,
        53.85079463676897,
        57.0113760804951,
        60.16994561319463,
        63.32680859151051,
        66.48221126006788,
        69.63635445618615,
        72.78940365610535,
        75.94149645753154,
        79.09274823307081,
        82.24325645733805,
        85.3931040581169,
        88.54236203974213,
        91.69109155710925,
        94.8393455703146,
        97.98717017584391,
        101.13460568589954,
    ],
    [
        8.577836489714073,
        12.932386237089574,
        16.529365884366946,
        19.94185336652734,
        23.26805292645757,
        26.545032061823576,
        29.79074858319661,
        33.015178641375144,
        36.22438054878717,
        39.42227457893925,
        42.61152217228668,
        45.793999658055,
        48.9710709519006,
        52.143752969301985,
        55.31282033040344,
        58.478874029898776,
        61.642387847310786,
        64.80374053364926,
        67.96323864064826,
        71.12113303573145,
        74.27763105998602,
        77.43290561955607,
        80.58710208011289,
        83.7403435621429,
        86.8927350552407,
        90.0443666487136,
        93.19531609297565,
        96.34565084854015,
        99.49542973867352,
        102.64470429259325,
    ],
    [
        9.647421651997213,
        14.115518907894618,
        17.774012366915258,
        21.22906262285312,
        24.587197486317677,
        27.889269427955092,
        31.155326556188328,
        34.39662855427218,
        37.620078044197086,
        40.830178681822034,
        44.03001033796615,
        47.221758471887114,
        50.40702096703437,
        53.58699543539832,
        56.76259847510528,
        59.93454430932232,
        63.10339820151678,
        66.26961367334064,
        69.43355901716319,
        72.59553655331064,
        75.75579686050989,
        78.91454945470946,
        82.07197091426934,
        85.22821113996153,
        88.38339823308635,
        91.53764233642943,
        94.6910386875181,
        97.84367006710133,
        100.99560877862515,
        104.14691826061272,
    ],
    [
        10.711433970699947,
        15.28673766733295,
        19.00459353794605,
        22.501398726777282,
        25.891277276839133,
        29.21856349993608,
        32.50524735237552,
        35.7637929288088,
        39.00190281151421,
        42.224638430753274,
        45.43548309747554,
        48.63692264530553,
        51.83078392583472,
        55.01844255063594,
        58.200955824859506,
        61.379150814233995,
        64.55368442571813,
        67.72508544065195,
        70.89378457205802,
        74.06013637493132,
        77.22443549174102,
        80.38692888201246,
        83.54782515520287,
        86.70730178138353,
        89.86551072510355,
        93.02258289255423,
        96.17863167512078,
        99.33375579744927,
        102.48804162489603,
        105.641565046882,
    ],
    [
        11.770876674955584,
        16.447852748486497,
        20.2230314126817,
        23.76071586032745,
        27.18202152719053,
        30.534504754007074,
        33.84196577513572,
        37.118000423665606,
        40.371068905333885,
        43.60676490137952,
        46.82895944656457,
        50.04042897094345,
        53.243223214220535,
        56.438892058982546,
        59.628631306921505,
        62.81337964569326,
        65.99388505360736,
        69.1707514239946,
        72.344472018401,
        75.51545393008143,
        78.6840362771743,
        81.85050393742233,
        85.01509805785756,
        88.17802419536528,
        91.3394586924272,
        94.49955372141636,
        97.65844131268636,
        100.81623659876834,
        103.97304044792872,
        107.12894161772371,
    ],
];

/// First zero of `J_11`.
pub(crate) const J_CUTOFF: f64 = 15.589847884455484;

/// First zero of `J'_11`.
pub(crate) const JP_CUTOFF: f64 = 12.826491228033461;
