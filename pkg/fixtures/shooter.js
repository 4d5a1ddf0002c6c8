// Arena shooter: gun heat, bullet pool, enemy rings, wave pressure.
var gunHeat = 0;
var bulletPool = [];
var enemyRing = [];
var playerHp = 50;
var score = 0;
var wave = 1;

function spawnRing(count) {
  var out = [];
  var i = 0;
  while (i < count) {
    var angle = (i * 360 / count) % 360;
    out.push({angle: angle, radius: 60, hp: 3 + wave});
    i = i + 1;
  }
  return out;
}

function fireGun(x, y) {
  if (gunHeat < 8) {
    bulletPool.push({angle: (x * 3) % 360, radius: 4, power: 2 + (wave % 2)});
    gunHeat = gunHeat + 3;
  }
}

function coolGun() {
  if (gunHeat > 0) { gunHeat = gunHeat - 1; }
}

function moveBullets() {
  var i = 0;
  while (i < bulletPool.length) {
    var b = bulletPool[i];
    b.radius = b.radius + 6;
    if (b.radius > 90) {
      bulletPool.splice(i, 1);
      continue;
    }
    i = i + 1;
  }
}

function bulletHits() {
  var i = 0;
  while (i < bulletPool.length) {
    var b = bulletPool[i];
    var j = 0;
    var hit = false;
    while (j < enemyRing.length) {
      var foe = enemyRing[j];
      var da = Math.abs(foe.angle - b.angle);
      var dr = Math.abs(foe.radius - b.radius);
      if (da < 14 && dr < 8) {
        foe.hp = foe.hp - b.power;
        hit = true;
        if (foe.hp <= 0) {
          score = score + 9 * wave;
          enemyRing.splice(j, 1);
        }
        break;
      }
      j = j + 1;
    }
    if (hit) {
      bulletPool.splice(i, 1);
      continue;
    }
    i = i + 1;
  }
}

function enemiesAdvance() {
  var j = 0;
  while (j < enemyRing.length) {
    var foe = enemyRing[j];
    foe.radius = foe.radius - 0.8;
    foe.angle = (foe.angle + 2) % 360;
    if (foe.radius < 8) {
      playerHp = playerHp - foe.hp;
      enemyRing.splice(j, 1);
      continue;
    }
    j = j + 1;
  }
}

function tickShooter(t) {
  coolGun();
  moveBullets();
  bulletHits();
  enemiesAdvance();
  if (enemyRing.length === 0) {
    wave = wave + 1;
    enemyRing = spawnRing(4 + wave);
    console.log("wave", wave, "incoming");
  }
  if (playerHp <= 0) {
    console.log("down at wave", wave, "score", score);
    playerHp = 50;
    wave = 1;
    score = Math.floor(score * 0.75);
  }
  commitState({score: score, hp: playerHp, wave: wave, heat: gunHeat});
}

enemyRing = spawnRing(5);
registerTap(fireGun);
registerTick(tickShooter);
console.log("shooter armed");
